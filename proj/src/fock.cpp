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

#include "bqec/fock.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "bqec/errors.hpp"

namespace bqec {

namespace {

std::mutex g_warn_mutex;
WarningHandler g_warn_handler;
std::set<std::string> g_warned;

void require_ancilla(const HilbertConfig& cfg, const char* what) {
    if (!cfg.include_ancilla) {
        throw DimensionMismatch(std::string(what) + " requires a HilbertConfig with an ancilla");
    }
}

Operator ancilla_matrix(const HilbertConfig& cfg, const Operator& m2) {
    require_ancilla(cfg, "ancilla operator");
    return Eigen::kroneckerProduct(m2, Operator::Identity(cfg.osc_dim(), cfg.osc_dim())).eval();
}

}  // namespace

void set_warning_handler(WarningHandler handler) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    g_warn_handler = std::move(handler);
}

void warn(const std::string& message) {
    std::lock_guard<std::mutex> lock(g_warn_mutex);
    if (g_warn_handler) {
        g_warn_handler(message);
        return;
    }
    if (g_warned.insert(message).second) {
        std::cerr << "warning: " << message << "\n";
    }
}

Tolerances& tolerances() {
    static Tolerances tol;
    return tol;
}

void HilbertConfig::validate() const {
    if (n_max < 1) {
        throw DimensionMismatch("n_max must be at least 1");
    }
}

bool is_hermitian(const Operator& op, double tol) {
    if (op.rows() != op.cols()) {
        return false;
    }
    return (op - op.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

bool is_hermitian(const Operator& op) { return is_hermitian(op, tolerances().hermitian); }

double unitarity_defect(const Operator& op) {
    if (op.rows() != op.cols()) {
        throw DimensionMismatch("unitarity_defect: operator is not square");
    }
    return (op.adjoint() * op - Operator::Identity(op.rows(), op.cols())).cwiseAbs().maxCoeff();
}

bool is_unitary(const Operator& op, double tol) {
    return op.rows() == op.cols() && unitarity_defect(op) <= tol;
}

bool is_unitary(const Operator& op) { return is_unitary(op, tolerances().unitary); }

bool is_diagonal(const Operator& op, double tol) {
    for (Eigen::Index j = 0; j < op.cols(); ++j) {
        for (Eigen::Index i = 0; i < op.rows(); ++i) {
            if (i != j && std::abs(op(i, j)) > tol) {
                return false;
            }
        }
    }
    return true;
}

QuantumState QuantumState::ket(Ket amplitudes) {
    QuantumState s;
    s.kind_ = Kind::kKet;
    s.ket_ = std::move(amplitudes);
    return s;
}

QuantumState QuantumState::density(Operator rho) {
    QuantumState s;
    s.kind_ = Kind::kDensity;
    s.rho_ = std::move(rho);
    return s;
}

int QuantumState::dim() const {
    return static_cast<int>(kind_ == Kind::kKet ? ket_.size() : rho_.rows());
}

const Ket& QuantumState::amplitudes() const {
    if (kind_ != Kind::kKet) {
        throw InvalidState("state is a density operator, not a ket");
    }
    return ket_;
}

const Operator& QuantumState::density_entries() const {
    if (kind_ != Kind::kDensity) {
        throw InvalidState("state is a ket, not a density operator");
    }
    return rho_;
}

Operator QuantumState::to_density() const {
    if (kind_ == Kind::kDensity) {
        return rho_;
    }
    return ket_ * ket_.adjoint();
}

cplx QuantumState::expectation(const Operator& op) const {
    if (op.rows() != dim() || op.cols() != dim()) {
        throw DimensionMismatch("expectation: operator and state dimensions differ");
    }
    if (kind_ == Kind::kKet) {
        return ket_.dot(op * ket_);
    }
    return (op * rho_).trace();
}

void QuantumState::validate() const {
    const Tolerances& tol = tolerances();
    if (kind_ == Kind::kKet) {
        const double norm2 = ket_.squaredNorm();
        if (std::abs(norm2 - 1.0) > tol.ket_norm) {
            std::ostringstream msg;
            msg << "ket norm^2 = " << norm2;
            throw InvalidState(msg.str());
        }
        return;
    }
    if (rho_.rows() != rho_.cols()) {
        throw InvalidState("density operator is not square");
    }
    const cplx tr = rho_.trace();
    if (std::abs(tr - 1.0) > tol.trace) {
        std::ostringstream msg;
        msg << "density trace = " << tr;
        throw InvalidState(msg.str());
    }
    if (!is_hermitian(rho_, tol.density_hermitian)) {
        throw InvalidState("density operator is not Hermitian");
    }
    Eigen::SelfAdjointEigenSolver<Operator> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < tol.min_eigenvalue) {
        std::ostringstream msg;
        msg << "density operator has eigenvalue " << es.eigenvalues().minCoeff();
        throw InvalidState(msg.str());
    }
}

Ket fock_ket(const HilbertConfig& cfg, int n, int ancilla) {
    if (n < 0 || n > cfg.n_max || ancilla < 0 || ancilla > 1 || (ancilla == 1 && !cfg.include_ancilla)) {
        throw DimensionMismatch("fock_ket: level outside the truncated space");
    }
    Ket v = Ket::Zero(cfg.dim());
    v(cfg.index(n, ancilla)) = 1.0;
    return v;
}

Operator identity(const HilbertConfig& cfg) { return Operator::Identity(cfg.dim(), cfg.dim()); }

Operator embed_oscillator(const HilbertConfig& cfg, const Operator& osc_op) {
    if (osc_op.rows() != cfg.osc_dim() || osc_op.cols() != cfg.osc_dim()) {
        throw DimensionMismatch("embed_oscillator: operator dimension does not match n_max + 1");
    }
    if (!cfg.include_ancilla) {
        return osc_op;
    }
    return Eigen::kroneckerProduct(Operator::Identity(2, 2), osc_op).eval();
}

Operator embed_ancilla(const HilbertConfig& cfg, const Operator& anc_op) {
    if (anc_op.rows() != 2 || anc_op.cols() != 2) {
        throw DimensionMismatch("embed_ancilla: operator must be 2x2");
    }
    return ancilla_matrix(cfg, anc_op);
}

Ket embed_ket(const HilbertConfig& cfg, const Ket& osc_ket, int ancilla) {
    if (osc_ket.size() != cfg.osc_dim()) {
        throw DimensionMismatch("embed_ket: ket dimension does not match n_max + 1");
    }
    if (!cfg.include_ancilla) {
        if (ancilla != 0) {
            throw DimensionMismatch("embed_ket: no ancilla in this space");
        }
        return osc_ket;
    }
    Ket v = Ket::Zero(cfg.dim());
    v.segment(ancilla * cfg.osc_dim(), cfg.osc_dim()) = osc_ket;
    return v;
}

Operator trace_out_oscillator(const HilbertConfig& cfg, const Operator& rho) {
    require_ancilla(cfg, "trace_out_oscillator");
    const int d = cfg.osc_dim();
    Operator out(2, 2);
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            out(a, b) = rho.block(a * d, b * d, d, d).trace();
        }
    }
    return out;
}

Operator trace_out_ancilla(const HilbertConfig& cfg, const Operator& rho) {
    if (!cfg.include_ancilla) {
        return rho;
    }
    const int d = cfg.osc_dim();
    return rho.block(0, 0, d, d) + rho.block(d, d, d, d);
}

Operator destroy(const HilbertConfig& cfg) {
    cfg.validate();
    Operator a = Operator::Zero(cfg.osc_dim(), cfg.osc_dim());
    for (int n = 1; n <= cfg.n_max; ++n) {
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return embed_oscillator(cfg, a);
}

Operator create(const HilbertConfig& cfg) { return destroy(cfg).adjoint(); }

Operator number(const HilbertConfig& cfg) {
    Operator n = Operator::Zero(cfg.osc_dim(), cfg.osc_dim());
    for (int k = 0; k <= cfg.n_max; ++k) {
        n(k, k) = static_cast<double>(k);
    }
    return embed_oscillator(cfg, n);
}

Operator parity_op(const HilbertConfig& cfg) {
    Operator p = Operator::Zero(cfg.osc_dim(), cfg.osc_dim());
    for (int k = 0; k <= cfg.n_max; ++k) {
        p(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    }
    return embed_oscillator(cfg, p);
}

Operator ancilla_lowering(const HilbertConfig& cfg) {
    Operator m = Operator::Zero(2, 2);
    m(0, 1) = 1.0;
    return ancilla_matrix(cfg, m);
}

Operator ancilla_raising(const HilbertConfig& cfg) { return ancilla_lowering(cfg).adjoint(); }

Operator ancilla_projector(const HilbertConfig& cfg, int level) {
    Operator m = Operator::Zero(2, 2);
    m(level, level) = 1.0;
    return ancilla_matrix(cfg, m);
}

Operator ancilla_sigma_x(const HilbertConfig& cfg) {
    Operator m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return ancilla_matrix(cfg, m);
}

Operator ancilla_sigma_y(const HilbertConfig& cfg) {
    Operator m(2, 2);
    m << 0.0, -kI, kI, 0.0;
    return ancilla_matrix(cfg, m);
}

Operator ancilla_sigma_z(const HilbertConfig& cfg) {
    Operator m = Operator::Zero(2, 2);
    m(0, 0) = -1.0;
    m(1, 1) = 1.0;
    return ancilla_matrix(cfg, m);
}

Operator ancilla_rotation(const HilbertConfig& cfg, double angle, double phase) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const cplx e = std::exp(kI * phase);
    Operator m(2, 2);
    // exp(-i angle/2 (cos phase X + sin phase Y))
    m << c, -kI * s * std::conj(e), -kI * s * e, c;
    return ancilla_matrix(cfg, m);
}

Operator displacement(const HilbertConfig& cfg, cplx alpha) {
    const double n_safe = cfg.n_max / 4.0;
    if (std::norm(alpha) > n_safe) {
        std::ostringstream msg;
        msg << "displacement: |alpha|^2 = " << std::norm(alpha) << " exceeds n_max/4 = " << n_safe;
        warn(msg.str());
    }
    // Exponential of the truncated generator: exactly unitary on the truncated space.
    const HilbertConfig osc = cfg.oscillator_only();
    const Operator a = destroy(osc);
    // exp(alpha a+ - alpha* a) = exp(-i K) with K = i (alpha a+ - alpha* a) Hermitian.
    const Operator d = expm(kI * (alpha * a.adjoint() - std::conj(alpha) * a), 1.0);
    // Truncation diagnostic: the displaced vacuum against exact coherent amplitudes.
    Ket coherent(cfg.osc_dim());
    double log_fact = 0.0;
    for (int n = 0; n < cfg.osc_dim(); ++n) {
        log_fact += n > 0 ? std::log(static_cast<double>(n)) : 0.0;
        coherent(n) = std::exp(-0.5 * std::norm(alpha) - 0.5 * log_fact) * std::pow(alpha, n);
    }
    const double defect = (d.col(0) - coherent).norm();
    if (defect > 1e-3) {
        std::ostringstream msg;
        msg << "displacement: coherent-state defect " << defect << " at n_max = " << cfg.n_max;
        warn(msg.str());
    }
    return embed_oscillator(cfg, d);
}

Operator expm(const Operator& op, double t) {
    if (op.rows() != op.cols()) {
        throw DimensionMismatch("expm: operator is not square");
    }
    const Eigen::Index n = op.rows();
    if (is_diagonal(op)) {
        Operator out = Operator::Zero(n, n);
        for (Eigen::Index k = 0; k < n; ++k) {
            out(k, k) = std::exp(-kI * op(k, k) * t);
        }
        return out;
    }
    if (is_hermitian(op, 1e-12 * std::max(1.0, op.cwiseAbs().maxCoeff()))) {
        const Operator h = 0.5 * (op + op.adjoint());
        Eigen::SelfAdjointEigenSolver<Operator> es(h);
        const Eigen::VectorXd& w = es.eigenvalues();
        Eigen::VectorXcd phases(n);
        for (Eigen::Index k = 0; k < n; ++k) {
            phases(k) = std::exp(-kI * w(k) * t);
        }
        return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
    }
    return expm_general(-kI * t * op);
}

Operator expm_general(const Operator& m) {
    if (m.rows() != m.cols()) {
        throw DimensionMismatch("expm_general: operator is not square");
    }
    return m.exp();
}

}  // namespace bqec
