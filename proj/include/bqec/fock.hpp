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

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bqec {

using cplx = std::complex<double>;
typedef Eigen::MatrixXcd Operator;
typedef Eigen::VectorXcd Ket;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr cplx kI{0.0, 1.0};

// Numerical tolerances shared by validity checks. Overridable at runtime.
struct Tolerances {
    double hermitian = 1e-12;
    double unitary = 1e-10;
    double ket_norm = 1e-10;
    double trace = 1e-9;
    double density_hermitian = 1e-10;
    double min_eigenvalue = -1e-8;
};

Tolerances& tolerances();

// Truncated oscillator, optionally tensored with a two-level ancilla.
// Basis ordering is ancilla-major: index = ancilla * (n_max + 1) + n.
struct HilbertConfig {
    int n_max = 12;
    bool include_ancilla = false;

    int osc_dim() const { return n_max + 1; }
    int dim() const { return include_ancilla ? 2 * (n_max + 1) : n_max + 1; }
    int index(int n, int ancilla = 0) const { return ancilla * (n_max + 1) + n; }
    HilbertConfig oscillator_only() const { return HilbertConfig{n_max, false}; }
    HilbertConfig with_ancilla() const { return HilbertConfig{n_max, true}; }
    void validate() const;
    bool operator==(const HilbertConfig&) const = default;
};

bool is_hermitian(const Operator& op, double tol);
bool is_hermitian(const Operator& op);
bool is_unitary(const Operator& op, double tol);
bool is_unitary(const Operator& op);
// max |A^dagger A - I|
double unitarity_defect(const Operator& op);
bool is_diagonal(const Operator& op, double tol = 0.0);

class QuantumState {
  public:
    enum class Kind { kKet, kDensity };

    static QuantumState ket(Ket amplitudes);
    static QuantumState density(Operator rho);

    Kind kind() const { return kind_; }
    bool is_ket() const { return kind_ == Kind::kKet; }
    int dim() const;
    const Ket& amplitudes() const;
    const Operator& density_entries() const;
    // Projector |psi><psi| for kets, the matrix itself for densities.
    Operator to_density() const;
    cplx expectation(const Operator& op) const;
    // Throws InvalidState when the normalization or positivity contract fails.
    void validate() const;

  private:
    QuantumState() = default;
    Kind kind_ = Kind::kKet;
    Ket ket_;
    Operator rho_;
};

Ket fock_ket(const HilbertConfig& cfg, int n, int ancilla = 0);
Operator identity(const HilbertConfig& cfg);
Operator destroy(const HilbertConfig& cfg);
Operator create(const HilbertConfig& cfg);
Operator number(const HilbertConfig& cfg);
Operator parity_op(const HilbertConfig& cfg);

// Ancilla operators (require include_ancilla). Ground state is ancilla index 0.
Operator ancilla_lowering(const HilbertConfig& cfg);
Operator ancilla_raising(const HilbertConfig& cfg);
Operator ancilla_projector(const HilbertConfig& cfg, int level);
Operator ancilla_sigma_x(const HilbertConfig& cfg);
Operator ancilla_sigma_y(const HilbertConfig& cfg);
// |e><e| - |g><g|
Operator ancilla_sigma_z(const HilbertConfig& cfg);
// Rotation exp(-i angle/2 (cos(phase) X + sin(phase) Y)) on the ancilla.
Operator ancilla_rotation(const HilbertConfig& cfg, double angle, double phase);

// Lift an (n_max+1)-dimensional oscillator operator to cfg.
Operator embed_oscillator(const HilbertConfig& cfg, const Operator& osc_op);
// Lift a 2x2 ancilla operator to cfg.
Operator embed_ancilla(const HilbertConfig& cfg, const Operator& anc_op);
Ket embed_ket(const HilbertConfig& cfg, const Ket& osc_ket, int ancilla);
// Reduce a joint density matrix to the ancilla (2x2) or the oscillator.
Operator trace_out_oscillator(const HilbertConfig& cfg, const Operator& rho);
Operator trace_out_ancilla(const HilbertConfig& cfg, const Operator& rho);

// exp(alpha a^dagger - alpha^* a), built in a padded space and cropped.
Operator displacement(const HilbertConfig& cfg, cplx alpha);

// exp(-i op t). Hermitian input uses an eigendecomposition; diagonal input
// is exponentiated elementwise.
Operator expm(const Operator& op, double t);
// Plain matrix exponential exp(m).
Operator expm_general(const Operator& m);

}  // namespace bqec
