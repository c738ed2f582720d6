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

#include "bqec/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "bqec/errors.hpp"

namespace bqec {

namespace {

void check_dims(const Operator& H, const CollapseSet& c) {
    if (H.rows() != H.cols()) {
        throw DimensionMismatch("Hamiltonian is not square");
    }
    for (const CollapseOp& op : c) {
        if (op.op.rows() != H.rows() || op.op.cols() != H.cols()) {
            throw DimensionMismatch("collapse operator dimension does not match the Hamiltonian");
        }
        if (op.rate < 0.0) {
            throw DomainError("collapse rates must be non-negative");
        }
    }
}

// Crude upper bound for the spectral radius of the Lindblad generator.
double generator_scale(const Operator& H, const CollapseSet& c) {
    Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (H + H.adjoint()), Eigen::EigenvaluesOnly);
    double span = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
    for (const CollapseOp& op : c) {
        const double norm = op.op.norm();
        span += op.rate * norm * norm;
    }
    return span;
}

struct DisjointSet {
    std::vector<int> parent;
    explicit DisjointSet(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) {
            parent[std::max(a, b)] = std::min(a, b);
        }
    }
};

}  // namespace

std::string_view to_string(JumpKind kind) {
    switch (kind) {
        case JumpKind::kPhotonLoss:
            return "photon-loss";
        case JumpKind::kPhotonGain:
            return "photon-gain";
        case JumpKind::kAncillaDecay:
            return "ancilla-decay";
        case JumpKind::kAncillaExcitation:
            return "ancilla-excitation";
        case JumpKind::kAncillaDephasing:
            return "ancilla-dephasing";
        case JumpKind::kCustom:
            return "custom";
    }
    return "custom";
}

CollapseSet make_collapse_set(const HilbertConfig& cfg, const NoiseParams& noise, const CollapseOptions& opts) {
    CollapseSet c;
    const Operator a = destroy(cfg);
    if (opts.photon_loss && noise.kappa_s > 0.0) {
        c.push_back({noise.kappa_s * (1.0 + noise.n_th_s), a, JumpKind::kPhotonLoss});
    }
    if (opts.photon_gain && noise.kappa_s > 0.0 && noise.n_th_s > 0.0) {
        c.push_back({noise.kappa_s * noise.n_th_s, a.adjoint(), JumpKind::kPhotonGain});
    }
    if (!cfg.include_ancilla) {
        return c;
    }
    if (opts.ancilla_decay) {
        c.push_back({1.0 / noise.T1, ancilla_lowering(cfg), JumpKind::kAncillaDecay});
    }
    if (opts.ancilla_excitation && noise.n_th_q > 0.0) {
        c.push_back({noise.gamma_up(), ancilla_raising(cfg), JumpKind::kAncillaExcitation});
    }
    if (opts.ancilla_dephasing) {
        c.push_back({1.0 / (2.0 * noise.T_phi), ancilla_sigma_z(cfg), JumpKind::kAncillaDephasing});
    }
    return c;
}

Operator lindblad_rhs(const Operator& rho, const Operator& H, const CollapseSet& c) {
    Operator out = -kI * (H * rho - rho * H);
    for (const CollapseOp& op : c) {
        if (op.rate == 0.0) {
            continue;
        }
        const Operator Lr = op.op * rho;
        const Operator LdL = op.op.adjoint() * op.op;
        out += op.rate * (Lr * op.op.adjoint() - 0.5 * (LdL * rho + rho * LdL));
    }
    return out;
}

QuantumState lindblad_evolve(const QuantumState& rho, const Operator& H, const CollapseSet& c, double t, double dt) {
    if (rho.is_ket()) {
        throw InvalidState("lindblad_evolve expects a density operator");
    }
    rho.validate();
    check_dims(H, c);
    if (rho.dim() != H.rows()) {
        throw DimensionMismatch("state and Hamiltonian dimensions differ");
    }
    if (t < 0.0 || dt <= 0.0) {
        throw DomainError("lindblad_evolve needs t >= 0 and dt > 0");
    }
    if (t == 0.0) {
        return rho;
    }
    dt = std::min(dt, t);
    const long steps = static_cast<long>(std::ceil(t / dt - 1e-9));
    const double h = t / static_cast<double>(steps);
    double max_rate = 0.0;
    for (const CollapseOp& op : c) {
        const double norm = op.op.cwiseAbs().maxCoeff();
        max_rate = std::max(max_rate, op.rate * norm * norm);
    }
    if (h * max_rate > 0.01) {
        std::ostringstream msg;
        msg << "dt * max rate = " << h * max_rate << " exceeds 0.01";
        throw StepSizeTooLarge(msg.str());
    }
    if (h * generator_scale(H, c) > 2.5) {
        std::ostringstream msg;
        msg << "dt * generator scale = " << h * generator_scale(H, c) << " is outside the RK4 stability region";
        throw StepSizeTooLarge(msg.str());
    }
    Operator r = rho.density_entries();
    for (long k = 0; k < steps; ++k) {
        const cplx tr0 = r.trace();
        const Operator k1 = lindblad_rhs(r, H, c);
        const Operator k2 = lindblad_rhs(r + 0.5 * h * k1, H, c);
        const Operator k3 = lindblad_rhs(r + 0.5 * h * k2, H, c);
        const Operator k4 = lindblad_rhs(r + h * k3, H, c);
        r += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (std::abs(r.trace() - tr0) > 1e-6) {
            throw StepSizeTooLarge("trace drift exceeded 1e-6 in a single step");
        }
    }
    r = 0.5 * (r + r.adjoint());
    return QuantumState::density(r);
}

Operator liouvillian(const Operator& H, const CollapseSet& c) {
    check_dims(H, c);
    const Eigen::Index d = H.rows();
    const Operator id = Operator::Identity(d, d);
    Operator L = -kI * (Eigen::kroneckerProduct(id, H) - Eigen::kroneckerProduct(H.transpose(), id)).eval();
    for (const CollapseOp& op : c) {
        if (op.rate == 0.0) {
            continue;
        }
        const Operator LdL = op.op.adjoint() * op.op;
        L += op.rate * (Eigen::kroneckerProduct(op.op.conjugate(), op.op) - 0.5 * Eigen::kroneckerProduct(id, LdL) -
                        0.5 * Eigen::kroneckerProduct(LdL.transpose(), id))
                           .eval();
    }
    return L;
}

LindbladPropagator::LindbladPropagator(const Operator& H, const CollapseSet& c, double t)
    : dim_(static_cast<int>(H.rows())), t_(t) {
    if (t < 0.0) {
        throw DomainError("propagation time must be non-negative");
    }
    const Operator L = liouvillian(H, c);
    const int n = static_cast<int>(L.rows());
    DisjointSet sets(n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i != j && L(i, j) != cplx(0.0, 0.0)) {
                sets.unite(i, j);
            }
        }
    }
    std::vector<int> block_of(n, -1);
    for (int i = 0; i < n; ++i) {
        const int root = sets.find(i);
        if (block_of[root] < 0) {
            block_of[root] = static_cast<int>(blocks_.size());
            blocks_.push_back({});
        }
        blocks_[block_of[root]].index.push_back(i);
    }
    for (Block& b : blocks_) {
        const int m = static_cast<int>(b.index.size());
        Operator sub(m, m);
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < m; ++i) {
                sub(i, j) = L(b.index[i], b.index[j]) * t;
            }
        }
        b.map = (m == 1) ? Operator::Constant(1, 1, std::exp(sub(0, 0))) : Operator(sub.exp());
    }
}

Operator LindbladPropagator::apply(const Operator& rho) const {
    if (rho.rows() != dim_ || rho.cols() != dim_) {
        throw DimensionMismatch("LindbladPropagator::apply: state dimension mismatch");
    }
    Operator out(dim_, dim_);
    const cplx* in = rho.data();
    cplx* dst = out.data();
    Eigen::VectorXcd x;
    for (const Block& b : blocks_) {
        const Eigen::Index m = static_cast<Eigen::Index>(b.index.size());
        x.resize(m);
        for (Eigen::Index i = 0; i < m; ++i) {
            x(i) = in[b.index[i]];
        }
        const Eigen::VectorXcd y = b.map * x;
        for (Eigen::Index i = 0; i < m; ++i) {
            dst[b.index[i]] = y(i);
        }
    }
    return out;
}

Operator effective_hamiltonian(const Operator& H, const CollapseSet& c) {
    check_dims(H, c);
    Operator heff = H;
    for (const CollapseOp& op : c) {
        heff -= 0.5 * kI * op.rate * (op.op.adjoint() * op.op);
    }
    return heff;
}

Operator nojump_propagator(const HilbertConfig& cfg, const Operator& H, double kappa_s, double t) {
    if (t < 0.0) {
        throw DomainError("nojump_propagator: t must be non-negative");
    }
    if (H.rows() != cfg.dim() || H.cols() != cfg.dim()) {
        throw DimensionMismatch("nojump_propagator: Hamiltonian dimension does not match cfg");
    }
    const Operator gen = -kI * H * t - 0.5 * kappa_s * t * number(cfg);
    if (is_diagonal(gen)) {
        Operator out = Operator::Zero(cfg.dim(), cfg.dim());
        for (int k = 0; k < cfg.dim(); ++k) {
            out(k, k) = std::exp(gen(k, k));
        }
        return out;
    }
    return expm_general(gen);
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
    auto mix = [](std::uint64_t z) {
        z += 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    return mix(mix(master_seed) ^ (index * 0xD6E8FEB86659FD93ULL + 0x632BE59BD9B4E019ULL));
}

JumpEvolver::JumpEvolver(const Operator& H, const CollapseSet& c, double max_step)
    : dim_(static_cast<int>(H.rows())), max_step_(max_step) {
    check_dims(H, c);
    for (const CollapseOp& op : c) {
        if (op.rate > 0.0) {
            c_.push_back(op);
            jumps_.push_back(op.jump());
        }
    }
    heff_ = effective_hamiltonian(H, c_);
    diagonal_ = is_diagonal(heff_);
    if (diagonal_) {
        diag_ = -kI * heff_.diagonal();
    }
}

Ket JumpEvolver::nojump(const Ket& psi, double t) const {
    if (diagonal_) {
        return (diag_ * t).array().exp().matrix().cwiseProduct(psi);
    }
    return expm_general(-kI * t * heff_) * psi;
}

void JumpEvolver::jump(Ket& psi, Rng& rng, std::vector<JumpRecord>* jumps, double time) const {
    std::vector<double> w(jumps_.size());
    double total = 0.0;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        w[k] = (jumps_[k] * psi).squaredNorm();
        total += w[k];
    }
    if (!(total > 0.0)) {
        return;
    }
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const double r = uni(rng) * total;
    double acc = 0.0;
    std::size_t pick = jumps_.size() - 1;
    for (std::size_t k = 0; k < jumps_.size(); ++k) {
        acc += w[k];
        if (r < acc && w[k] > 0.0) {
            pick = k;
            break;
        }
    }
    while (w[pick] <= 0.0 && pick > 0) {
        --pick;
    }
    psi = jumps_[pick] * psi;
    psi /= psi.norm();
    if (jumps != nullptr) {
        jumps->push_back({time, c_[pick].kind, static_cast<int>(pick)});
    }
}

void JumpEvolver::evolve(Ket& psi, double duration, Rng& rng, std::vector<JumpRecord>* jumps, double t0) const {
    if (psi.size() != dim_) {
        throw DimensionMismatch("JumpEvolver::evolve: ket dimension mismatch");
    }
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    double t = 0.0;
    if (jumps_.empty()) {
        psi = nojump(psi, duration);
        psi /= psi.norm();
        return;
    }
    if (diagonal_) {
        const Eigen::VectorXd decay = 2.0 * diag_.real();
        while (t < duration) {
            const double target = uni(rng);
            const Eigen::VectorXd p = psi.cwiseAbs2();
            auto norm2 = [&](double tau) { return (p.array() * (decay * tau).array().exp()).sum(); };
            const double remaining = duration - t;
            if (norm2(remaining) > target) {
                psi = nojump(psi, remaining);
                psi /= psi.norm();
                break;
            }
            // norm2 is convex and decreasing: safeguarded Newton from the left.
            double lo = 0.0;
            double hi = remaining;
            double tau = 0.0;
            for (int it = 0; it < 200; ++it) {
                const double f = norm2(tau) - target;
                const double df = (p.array() * decay.array() * (decay * tau).array().exp()).sum();
                if (f > 0.0) {
                    lo = tau;
                } else {
                    hi = tau;
                }
                double next = (df < 0.0) ? tau - f / df : 0.5 * (lo + hi);
                if (!(next > lo && next < hi)) {
                    next = 0.5 * (lo + hi);
                }
                if (std::abs(next - tau) <= 1e-15 * std::max(1.0, remaining) + 1e-18) {
                    tau = next;
                    break;
                }
                tau = next;
            }
            psi = nojump(psi, tau);
            psi /= psi.norm();
            t += tau;
            jump(psi, rng, jumps, t0 + t);
        }
        return;
    }
    // General effective Hamiltonian: fixed steps, bisection inside the crossing step.
    const Operator step = expm_general(-kI * max_step_ * heff_);
    double target = uni(rng);
    double norm_acc = 1.0;  // squared norm of the unnormalized no-jump branch
    while (t < duration) {
        const double h = std::min(max_step_, duration - t);
        const Ket next = (h == max_step_) ? Ket(step * psi) : Ket(expm_general(-kI * h * heff_) * psi);
        const double n2 = next.squaredNorm() * norm_acc;
        if (n2 > target) {
            norm_acc = n2;
            psi = next / next.norm();
            t += h;
            continue;
        }
        double lo = 0.0;
        double hi = h;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            const Ket trial = expm_general(-kI * mid * heff_) * psi;
            if (trial.squaredNorm() * norm_acc > target) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        const double tau = 0.5 * (lo + hi);
        psi = expm_general(-kI * tau * heff_) * psi;
        psi /= psi.norm();
        t += tau;
        jump(psi, rng, jumps, t0 + t);
        target = uni(rng);
        norm_acc = 1.0;
    }
}

TrajectoryRecord trajectory_run(const QuantumState& psi, const std::vector<ScheduleItem>& schedule, std::uint64_t seed) {
    if (!psi.is_ket()) {
        throw InvalidState("trajectory_run expects a ket");
    }
    psi.validate();
    TrajectoryRecord rec;
    rec.final_state = psi.amplitudes();
    Rng rng(seed);
    double clock = 0.0;
    for (const ScheduleItem& item : schedule) {
        if (const auto* seg = std::get_if<Segment>(&item)) {
            if (seg->H.rows() != rec.final_state.size()) {
                throw DimensionMismatch("trajectory_run: segment dimension mismatch");
            }
            JumpEvolver ev(seg->H, seg->c);
            ev.evolve(rec.final_state, seg->duration, rng, &rec.jumps, clock);
            clock += seg->duration;
        } else {
            const auto& ev = std::get<Event>(item);
            rec.outcomes.emplace_back(ev.label, ev.apply(rec.final_state, rng));
        }
    }
    return rec;
}

}  // namespace bqec
