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

#include "doctest.h"

#include "bqec/errors.hpp"
#include "bqec/fidelity_model.hpp"
#include "bqec/syndrome.hpp"
#include "bqec/tomography.hpp"

using namespace bqec;

namespace {

IntrinsicPoint two_step_point() {
    IntrinsicPoint p;
    p.steps = 2;
    p.t_w = 18e-6;
    p.T_w_waits = 36e-6;
    p.T_w_full = 38.7e-6;
    p.probability = {{"00", 0.66}, {"01", 0.14}, {"10", 0.16}, {"11", 0.04}};
    p.fidelity = {{"00", 0.91}, {"01", 0.88}, {"10", 0.90}, {"11", 0.78}};
    return p;
}

IntrinsicPoint one_step_point() {
    IntrinsicPoint p;
    p.steps = 1;
    p.t_w = 36e-6;
    p.T_w_waits = 36e-6;
    p.T_w_full = 37.4e-6;
    p.probability = {{"0", 0.8}, {"1", 0.2}};
    p.fidelity = {{"0", 0.9}, {"1", 0.85}};
    return p;
}

}  // namespace

TEST_CASE("gate laws at the reference coherence") {
    const double F_U3 = FidelityModel::even_recovery_law().at(30e-6, 120e-6);
    const double F_U2 = FidelityModel::odd_recovery_law().at(30e-6, 120e-6);
    CHECK(F_U3 == doctest::Approx(0.978 - 0.233 / 30.0 - 0.181 / 120.0).epsilon(1e-12));
    CHECK(F_U2 == doctest::Approx(0.976 - 0.173 / 30.0 - 0.188 / 120.0).epsilon(1e-12));
    // Longer coherence can only help.
    CHECK(FidelityModel::even_recovery_law().at(60e-6, 120e-6) > F_U3);
    CHECK(FidelityModel::odd_recovery_law().at(30e-6, 240e-6) > F_U2);
}

TEST_CASE("model built from the device matches the closed-form parity fidelities") {
    DeviceParams dev;
    const FidelityModel f = FidelityModel::from_device(dev, dev.noise);
    const ParityFidelities p = parity_fidelity_model(dev, dev.noise);
    CHECK(f.F0 == doctest::Approx(p.F0).epsilon(1e-12));
    CHECK(f.F1 == doctest::Approx(p.F1).epsilon(1e-12));
    CHECK_NOTHROW(f.validate());
    FidelityModel bad = f;
    bad.F_pi = 1.2;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("round-trip calibration of encode and decode") {
    const double F = encode_fidelity_for_round_trip(0.931);
    CHECK(chi_from_normalized(F * F) == doctest::Approx(0.931).epsilon(1e-12));
}

TEST_CASE("N-step model reduces to the closed-form protocols") {
    FidelityModel f;
    const IntrinsicPoint p2 = two_step_point();
    CHECK(nstep_model(f, p2) == doctest::Approx(protocol2_model(f, p2)).epsilon(1e-14));
    CHECK(nstep_model(f, p2, TimeAxis::kFullDuration) ==
          doctest::Approx(protocol2_model(f, p2, TimeAxis::kFullDuration)).epsilon(1e-14));
    // The one-step model carries no pi-pulse factor.
    const IntrinsicPoint p1 = one_step_point();
    CHECK(nstep_model(f, p1) < protocol1_model(f, p1));
    f.F_pi = 1.0;
    CHECK(nstep_model(f, p1) == doctest::Approx(protocol1_model(f, p1)).epsilon(1e-14));
    CHECK_THROWS_AS(protocol1_model(f, p2), DomainError);
    CHECK_THROWS_AS(protocol2_model(f, p1), DomainError);
}

TEST_CASE("two-step model collapses to one step when the second detection is trivial") {
    // All second detections even, ideal second-stage elements.
    FidelityModel f;
    f.F0 = 1.0;
    f.F_pi = 1.0;
    f.F_U1 = f.F_U3 = 1.0;
    IntrinsicPoint p2 = two_step_point();
    p2.probability = {{"00", 0.8}, {"01", 0.0}, {"10", 0.2}, {"11", 0.0}};
    p2.fidelity = {{"00", 0.9}, {"01", 0.5}, {"10", 0.85}, {"11", 0.5}};
    IntrinsicPoint p1 = one_step_point();
    p1.T_w_waits = p2.T_w_waits;
    CHECK(protocol2_model(f, p2) == doctest::Approx(protocol1_model(f, p1)).epsilon(1e-14));
}

TEST_CASE("branch conditionals") {
    const IntrinsicPoint p = two_step_point();
    CHECK(p.p0() == doctest::Approx(0.80));
    CHECK(p.p00() == doctest::Approx(0.66 / 0.80));
    CHECK(p.p10() == doctest::Approx(0.16 / 0.20));
}

TEST_CASE("thermal factor and lifetime") {
    CHECK(thermal_flip_factor(0.0, 36e-6, 30e-6) == 1.0);
    CHECK(thermal_flip_factor(0.008, 36e-6, 30e-6) == doctest::Approx(1.0 - 0.008 * (1.0 - std::exp(-1.2))));
    CHECK(lifetime_from_round_fidelity(std::exp(-36.0 / 200.0), 36e-6) == doctest::Approx(200e-6).epsilon(1e-12));
    CHECK(lifetime_from_round_fidelity(std::exp(-1.0), 10e-6) == doctest::Approx(10e-6).epsilon(1e-12));
    CHECK_THROWS_AS(lifetime_from_round_fidelity(1.0, 36e-6), DomainError);
    CHECK_THROWS_AS(lifetime_from_round_fidelity(0.0, 36e-6), DomainError);
    // Higher per-round fidelity gives a longer lifetime.
    CHECK(lifetime_from_round_fidelity(0.85, 36e-6) > lifetime_from_round_fidelity(0.84, 36e-6));
}

TEST_CASE("intrinsic table interpolation") {
    IntrinsicErrorTable table;
    table.steps = 2;
    IntrinsicPoint a = two_step_point();
    IntrinsicPoint b = two_step_point();
    b.t_w = 20e-6;
    b.probability["00"] = 0.60;
    table.points = {a, b};
    const IntrinsicPoint mid = table.at(19e-6);
    CHECK(mid.probability.at("00") == doctest::Approx(0.63));
    CHECK(table.at(18e-6).probability.at("00") == doctest::Approx(0.66));
    CHECK_THROWS_AS(table.at(25e-6), DomainError);
}
