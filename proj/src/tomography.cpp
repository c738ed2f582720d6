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

#include "bqec/tomography.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "bqec/errors.hpp"

namespace bqec {

namespace {

typedef Eigen::Matrix<cplx, 16, 16> Matrix16;
typedef Eigen::Matrix<cplx, 16, 1> Vector16;

Eigen::Vector4cd vec(const Qubit2& m) { return Eigen::Map<const Eigen::Vector4cd>(m.data()); }

// Column-stacked superoperator of rho -> a rho b^dagger.
Eigen::Matrix4cd sandwich(const Qubit2& a, const Qubit2& b) {
    Eigen::Matrix4cd s;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            Qubit2 e = Qubit2::Zero();
            e(i, j) = 1.0;
            s.col(i + 2 * j) = vec(a * e * b.adjoint());
        }
    }
    return s;
}

const Eigen::PartialPivLU<Matrix16>& chi_solver() {
    static const Eigen::PartialPivLU<Matrix16> lu = [] {
        Matrix16 M;
        const auto& p = pauli_basis();
        for (int m = 0; m < 4; ++m) {
            for (int n = 0; n < 4; ++n) {
                const Eigen::Matrix4cd s = sandwich(p[m], p[n]);
                M.col(m + 4 * n) = Eigen::Map<const Vector16>(s.data());
            }
        }
        return Eigen::PartialPivLU<Matrix16>(M);
    }();
    return lu;
}

}  // namespace

ChiMatrix ChiMatrix::normalized() const {
    const double t = trace();
    if (!(std::abs(t) > 0.0)) {
        throw DomainError("ChiMatrix::normalized: zero trace");
    }
    ChiMatrix out;
    out.chi = chi / t;
    return out;
}

bool ChiMatrix::is_hermitian(double tol) const { return (chi - chi.adjoint()).cwiseAbs().maxCoeff() <= tol; }

const std::array<Qubit2, 4>& pauli_basis() {
    static const std::array<Qubit2, 4> p = [] {
        std::array<Qubit2, 4> b;
        b[0] << 1.0, 0.0, 0.0, 1.0;
        b[1] << 0.0, 1.0, 1.0, 0.0;
        b[2] << 0.0, -kI, kI, 0.0;
        b[3] << 1.0, 0.0, 0.0, -1.0;
        return b;
    }();
    return p;
}

std::vector<Qubit2> tomography_inputs(TomographySet set) {
    const Eigen::Vector2cd zero(1.0, 0.0), one(0.0, 1.0);
    const double r = 1.0 / std::sqrt(2.0);
    std::vector<Eigen::Vector2cd> kets = {zero, one, r * (zero + one), r * (zero + kI * one)};
    if (set == TomographySet::kSix) {
        kets.push_back(r * (zero - one));
        kets.push_back(r * (zero - kI * one));
    }
    std::vector<Qubit2> out;
    for (const auto& k : kets) {
        out.push_back(k * k.adjoint());
    }
    return out;
}

ChiMatrix chi_from_io(const std::vector<Qubit2>& inputs, const std::vector<Qubit2>& outputs) {
    if (inputs.size() != outputs.size() || inputs.empty()) {
        throw DimensionMismatch("chi_from_io: inputs and outputs must pair up");
    }
    const Eigen::Index k = static_cast<Eigen::Index>(inputs.size());
    Eigen::MatrixXcd X(4, k), Y(4, k);
    for (Eigen::Index i = 0; i < k; ++i) {
        X.col(i) = vec(inputs[i]);
        Y.col(i) = vec(outputs[i]);
    }
    // Superoperator S with S X = Y in the least-squares sense.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    if (sv.size() < 4 || sv(3) < 1e-10 * sv(0)) {
        throw IllConditionedInversion("process tomography: inputs do not span the operator space");
    }
    const Eigen::Matrix4cd S = (Y * svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().adjoint());
    const Vector16 v = chi_solver().solve(Eigen::Map<const Vector16>(S.data()));
    ChiMatrix out;
    out.chi = Eigen::Map<const Eigen::Matrix4cd>(v.data());
    return out;
}

ChiMatrix process_tomography(const std::function<Qubit2(const Qubit2&)>& channel, const std::vector<Qubit2>& inputs) {
    std::vector<Qubit2> outputs;
    outputs.reserve(inputs.size());
    for (const Qubit2& in : inputs) {
        outputs.push_back(channel(in));
    }
    return chi_from_io(inputs, outputs);
}

ChiMatrix process_tomography(const std::function<Qubit2(const Qubit2&)>& channel, TomographySet set) {
    return process_tomography(channel, tomography_inputs(set));
}

ChiMatrix project_physical(const ChiMatrix& chi) {
    const Eigen::Matrix4cd h = 0.5 * (chi.chi + chi.chi.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> es(h);
    const Eigen::Vector4d ev = es.eigenvalues().cwiseMax(0.0);
    ChiMatrix out;
    out.chi = es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint();
    const double t = chi.trace();
    if (out.trace() > 0.0 && t > 0.0) {
        out.chi *= t / out.trace();
    }
    return out;
}

double normalize_fidelity(double F_chi) {
    if (F_chi < 0.25 - 1e-9 || F_chi > 1.0 + 1e-9) {
        throw DomainError("normalize_fidelity: F_chi outside [0.25, 1]");
    }
    return (F_chi - 0.25) / 0.75;
}

double chi_from_normalized(double F) { return 0.25 + 0.75 * F; }

}  // namespace bqec
