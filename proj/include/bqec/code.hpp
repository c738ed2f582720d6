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

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bqec/device.hpp"
#include "bqec/fock.hpp"

namespace bqec {

typedef Eigen::Matrix2cd Qubit2;

struct CodeWords {
    Ket zero_L;
    Ket one_L;
};

// (|0> + |4>)/sqrt(2) and |2> on the oscillator space of cfg.
CodeWords binomial_code(const HilbertConfig& cfg);
// |0> and |1>.
CodeWords fock_code(const HilbertConfig& cfg);

// Deformed code words cos(theta)|0> + sin(theta) e^{i phi4}|4> and e^{i phi2}|2>
// after no-jump evolution for time t (four-photon-matched frame). phi3 is the
// relative phase of |3> against |1> for a jump at the end of the interval.
struct DeformationParams {
    double theta = kPi / 4.0;
    double phi2 = 0.0;
    double phi3 = 0.0;
    double phi4 = 0.0;
    double t = 0.0;
};

// Effective no-jump damping rate of the thermal oscillator pair: kappa (1 + 2 n_th).
double nojump_rate(const NoiseParams& noise);

DeformationParams compute_deformation(const DeviceParams& dev, const NoiseParams& noise, double t);

// Unitary U with U|source_i> = |target_i>, completed by Gram-Schmidt over the
// canonical basis in ascending index order. Throws NonOrthogonalInput.
Operator build_isometry_unitary(const std::vector<std::pair<Ket, Ket>>& pairs, int dim);
Operator build_isometry_unitary(const std::vector<std::pair<Ket, Ket>>& pairs, const HilbertConfig& cfg);

// sum_ij u_ij |L_i><L_j| + (1 - P_code)
Operator logical_operator(const CodeWords& code, const Qubit2& u);

// Embedded Pauli on span{b0, b1}, identity elsewhere. index 0..3 = I, X, Y, Z.
Operator subspace_pauli(const Ket& b0, const Ket& b1, int index);

// Single-qubit Clifford group (24 elements, global phase removed), fixed order.
const std::vector<Qubit2>& clifford_group();
// Index of the Clifford equal to u up to a global phase; -1 when absent.
int clifford_index(const Qubit2& u);

// Time layout of one bottom-layer step: [gate slot][wait t_w][projection]
// [measurement window][gate]. Recoveries are applied at the end of a step.
struct ProtocolTiming {
    double t_w = 17.895e-6;
    double gate_slot = 528e-9;
    // parity wait + T_BM + T_AM
    double measure_window = 0.0;

    double step() const { return gate_slot + t_w + measure_window; }
    double projection_time(int k) const { return k * step() + gate_slot + t_w; }
    double recovery_time(int k) const { return (k + 1) * step(); }
};

ProtocolTiming default_timing(const DeviceParams& dev, double t_w);

// Recovery unitaries for an N-step round (oscillator space).
struct RecoverySet {
    int steps = 2;
    ProtocolTiming timing;
    // odd[k]: error space after step k -> deformed code space at the end of step k
    // (the undeformed code space for k = steps - 1).
    std::vector<Operator> odd;
    // deformed code space at the end of the round -> code space
    Operator even_final;
    // Normalized deformed code words at the end of each step.
    std::vector<CodeWords> deformed;
    // Error-space basis e^{i phi}|3>, |1> used by odd[k].
    std::vector<CodeWords> error_basis;
    // Exact-deformation filters (empty unless requested): applied before the unitary.
    std::vector<Operator> odd_filter;
    Operator even_filter;
};

RecoverySet make_recovery_set(const HilbertConfig& cfg, const DeviceParams& dev, const NoiseParams& noise,
                              const ProtocolTiming& timing, int steps, bool exact_deformation = false);

struct GateSet {
    CodeWords code;
    // Joint ancilla-oscillator maps: |g,0> -> |g,0_L>, |e,0> -> |g,1_L>; DE = EN^dagger.
    Operator EN;
    Operator DE;
    // Oscillator-space recoveries. U1/U2: one-step round (even/odd); U2/U3/U4: two-step round.
    Operator U1;
    Operator U2;
    Operator U3;
    Operator U4;
    Operator U2_single_step;
    std::vector<Operator> cliffords;
    Operator T_L;
    RecoverySet one_step;
    RecoverySet two_step;
};

GateSet make_gates(const HilbertConfig& cfg, const DeviceParams& dev, const NoiseParams& noise, double t_w);

// Ancilla-to-oscillator encoder for an arbitrary code (joint space).
Operator make_encoder(const HilbertConfig& cfg, const CodeWords& code);

}  // namespace bqec
