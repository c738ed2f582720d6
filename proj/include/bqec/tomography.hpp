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

#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "bqec/fock.hpp"

namespace bqec {

typedef Eigen::Matrix2cd Qubit2;

/// Process matrix in the {I, X, Y, Z} basis: E(rho) = sum_mn chi(m, n) s_m rho s_n^dagger.
struct ChiMatrix {
    Eigen::Matrix4cd chi = Eigen::Matrix4cd::Zero();

    /// Overlap with the identity process, tr(chi chi_ideal).
    double process_fidelity() const { return chi(0, 0).real(); }
    double trace() const { return chi.trace().real(); }
    /// Copy scaled to unit trace; throws DomainError for a null process.
    ChiMatrix normalized() const;
    bool is_hermitian(double tol = 1e-9) const;
};

enum class TomographySet { kFour, kSix };

const std::array<Qubit2, 4>& pauli_basis();

/// Input density matrices: |0>, |1>, |+>, |+i> (and |->, |-i> for the six-state set).
std::vector<Qubit2> tomography_inputs(TomographySet set = TomographySet::kFour);

/// Linear-inversion reconstruction from matched input/output density matrices. Outputs may be
/// unnormalized (trace-decreasing branches). Throws IllConditionedInversion when the inputs do not
/// span the operator space.
ChiMatrix chi_from_io(const std::vector<Qubit2>& inputs, const std::vector<Qubit2>& outputs);

ChiMatrix process_tomography(const std::function<Qubit2(const Qubit2&)>& channel,
                             TomographySet set = TomographySet::kFour);
ChiMatrix process_tomography(const std::function<Qubit2(const Qubit2&)>& channel, const std::vector<Qubit2>& inputs);

/// Nearest trace-preserving-cone point: negative eigenvalues clipped, trace restored.
ChiMatrix project_physical(const ChiMatrix& chi);

/// (F_chi - 1/4) / (3/4). Throws DomainError below 0.25 - 1e-9 or above 1 + 1e-9.
double normalize_fidelity(double F_chi);
double chi_from_normalized(double F);

}  // namespace bqec
