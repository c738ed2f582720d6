// Copyright 2026 The bqec Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <vector>

#include "doctest.h"

#include "bqec/errors.hpp"
#include "bqec/tomography.hpp"

using namespace bqec;

namespace {

Qubit2 random_unitary(unsigned seed) {
    srand(seed);
    const Eigen::Matrix2cd m = Eigen::Matrix2cd::Random();
    Eigen::HouseholderQR<Eigen::Matrix2cd> qr(m);
    return qr.householderQ();
}

}  // namespace

TEST_CASE("identity process") {
    const ChiMatrix chi = process_tomography([](const Qubit2& r) { return r; });
    CHECK(chi.process_fidelity() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chi.trace() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(chi.is_hermitian());
}

TEST_CASE("fully depolarizing process") {
    const ChiMatrix chi = process_tomography([](const Qubit2& r) -> Qubit2 { return 0.5 * r.trace() * Qubit2::Identity(); });
    CHECK(chi.process_fidelity() == doctest::Approx(0.25).epsilon(1e-12));
    for (int i = 0; i < 4; ++i) {
        CHECK(chi.chi(i, i).real() == doctest::Approx(0.25).epsilon(1e-12));
    }
}

TEST_CASE("Pauli channels land on the matching diagonal entry") {
    for (int k = 0; k < 4; ++k) {
        const Qubit2 s = pauli_basis()[k];
        const ChiMatrix chi = process_tomography([&](const Qubit2& r) -> Qubit2 { return s * r * s.adjoint(); });
        CHECK(chi.chi(k, k).real() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(chi.trace() == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("six-state set agrees with the four-state set") {
    const Qubit2 u = random_unitary(3);
    auto channel = [&](const Qubit2& r) -> Qubit2 {
        const Qubit2 out = u * r * u.adjoint();
        return 0.9 * out + 0.1 * 0.5 * out.trace() * Qubit2::Identity();
    };
    const ChiMatrix a = process_tomography(channel, TomographySet::kFour);
    const ChiMatrix b = process_tomography(channel, TomographySet::kSix);
    CHECK((a.chi - b.chi).norm() < 1e-10);
}

TEST_CASE("ill-conditioned inputs are rejected") {
    const std::vector<Qubit2> inputs(4, tomography_inputs()[0]);
    CHECK_THROWS_AS(chi_from_io(inputs, inputs), IllConditionedInversion);
    CHECK_THROWS_AS(chi_from_io(tomography_inputs(), {Qubit2::Identity()}), DimensionMismatch);
}

TEST_CASE("normalized fidelity") {
    CHECK(normalize_fidelity(0.814) == doctest::Approx(0.752).epsilon(1e-12));
    CHECK(normalize_fidelity(0.25) == doctest::Approx(0.0));
    CHECK(chi_from_normalized(normalize_fidelity(0.6)) == doctest::Approx(0.6));
    CHECK_THROWS_AS(normalize_fidelity(0.2), DomainError);
    CHECK_THROWS_AS(normalize_fidelity(1.01), DomainError);
}

TEST_CASE("physical projection") {
    ChiMatrix chi;
    chi.chi(0, 0) = 1.05;
    chi.chi(1, 1) = -0.05;
    const ChiMatrix p = project_physical(chi);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(p.chi);
    CHECK(es.eigenvalues().minCoeff() > -1e-12);
    CHECK(p.trace() == doctest::Approx(1.0));
    CHECK_THROWS_AS(ChiMatrix{}.normalized(), DomainError);
}
