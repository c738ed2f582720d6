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

#include "bqec/grape.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bqec/code.hpp"
#include "bqec/dynamics.hpp"
#include "bqec/errors.hpp"
#include "bqec/tomography.hpp"

namespace bqec {

namespace {

Operator slice_hamiltonian(const ControlProblem& p, const PulseSet& pulses, int k) {
    Operator H = p.drift;
    for (int j = 0; j < kPulseChannels; ++j) {
        H += pulses.channel[j][k] * p.controls[j];
    }
    return H;
}

struct Slice {
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd values;
    Operator U;
};

Slice exponentiate(const Operator& H, double dt) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (H + H.adjoint()));
    Slice s;
    s.vectors = es.eigenvectors();
    s.values = es.eigenvalues();
    Eigen::VectorXcd phase(s.values.size());
    for (Eigen::Index i = 0; i < phase.size(); ++i) {
        phase(i) = std::exp(-kI * s.values(i) * dt);
    }
    s.U = s.vectors * phase.asDiagonal() * s.vectors.adjoint();
    return s;
}

// (e^{-i a dt} - e^{-i b dt}) / (a - b), written to stay finite at a = b.
cplx divided_difference(double a, double b, double dt) {
    const double x = 0.5 * (a - b) * dt;
    const double sinc = std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
    return -kI * dt * std::exp(-kI * 0.5 * (a + b) * dt) * sinc;
}

cplx overlap(const ControlProblem& p, const Eigen::MatrixXcd& out) {
    return (p.target.adjoint() * out).trace() / static_cast<double>(p.subspace_dim());
}

double smoothness_penalty(const PulseSet& pulses, double weight) {
    if (weight == 0.0) {
        return 0.0;
    }
    double s = 0.0;
    for (int j = 0; j < kPulseChannels; ++j) {
        const auto& c = pulses.channel[j];
        for (std::size_t k = 1; k < c.size(); ++k) {
            const double d = (c[k] - c[k - 1]) / pulses.bound[j];
            s += d * d;
        }
    }
    return weight * s;
}

// Flattened variables in units of each channel bound.
Eigen::VectorXd to_vars(const PulseSet& p) {
    const int n = p.samples();
    Eigen::VectorXd x(kPulseChannels * n);
    for (int j = 0; j < kPulseChannels; ++j) {
        for (int k = 0; k < n; ++k) {
            x(j * n + k) = p.channel[j][k] / p.bound[j];
        }
    }
    return x;
}

void from_vars(const Eigen::VectorXd& x, PulseSet& p) {
    const int n = p.samples();
    for (int j = 0; j < kPulseChannels; ++j) {
        for (int k = 0; k < n; ++k) {
            p.channel[j][k] = std::clamp(x(j * n + k), -1.0, 1.0) * p.bound[j];
        }
    }
}

struct Objective {
    double value = 0.0;
    double fidelity = 0.0;
    Eigen::VectorXd gradient;
};

Objective evaluate(const ControlProblem& problem, const PulseSet& pulses, const GrapeOptions& opts, bool with_gradient) {
    Objective o;
    if (!with_gradient) {
        o.fidelity = gate_fidelity(problem, pulses);
        o.value = o.fidelity - smoothness_penalty(pulses, opts.smoothness);
        return o;
    }
    const FidelityGradient fg = fidelity_and_gradient(problem, pulses, opts.gradient);
    o.fidelity = fg.fidelity;
    o.value = fg.fidelity - smoothness_penalty(pulses, opts.smoothness);
    const int n = pulses.samples();
    o.gradient.resize(kPulseChannels * n);
    for (int j = 0; j < kPulseChannels; ++j) {
        const auto& c = pulses.channel[j];
        const double b = pulses.bound[j];
        for (int k = 0; k < n; ++k) {
            double g = fg.gradient[j][k] * b;
            if (opts.smoothness != 0.0) {
                if (k > 0) {
                    g -= 2.0 * opts.smoothness * (c[k] - c[k - 1]) / b;
                }
                if (k + 1 < n) {
                    g += 2.0 * opts.smoothness * (c[k + 1] - c[k]) / b;
                }
            }
            o.gradient(j * n + k) = g;
        }
    }
    return o;
}

// Two-loop recursion for an ascent direction from the stored curvature pairs.
Eigen::VectorXd lbfgs_direction(const Eigen::VectorXd& g, const std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& mem) {
    Eigen::VectorXd q = g;
    std::vector<double> alpha(mem.size());
    for (int i = static_cast<int>(mem.size()) - 1; i >= 0; --i) {
        const auto& [s, y] = mem[i];
        alpha[i] = s.dot(q) / y.dot(s);
        q -= alpha[i] * y;
    }
    if (!mem.empty()) {
        const auto& [s, y] = mem.back();
        q *= s.dot(y) / y.dot(y);
    }
    for (std::size_t i = 0; i < mem.size(); ++i) {
        const auto& [s, y] = mem[i];
        const double beta = y.dot(q) / y.dot(s);
        q += (alpha[i] - beta) * s;
    }
    return q;
}

}  // namespace

PulseSet PulseSet::zeros(double duration, double dt) {
    PulseSet p;
    p.duration = duration;
    p.dt = dt;
    const int n = p.samples();
    for (auto& c : p.channel) {
        c.assign(n, 0.0);
    }
    return p;
}

PulseSet PulseSet::random(std::uint64_t seed, double fraction, double duration, double dt) {
    PulseSet p = zeros(duration, dt);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int j = 0; j < kPulseChannels; ++j) {
        for (double& v : p.channel[j]) {
            v = fraction * p.bound[j] * u(rng);
        }
    }
    return p;
}

int PulseSet::samples() const {
    if (!(dt > 0.0) || !(duration > 0.0)) {
        throw ConfigError("PulseSet: duration and dt must be positive");
    }
    const double r = duration / dt;
    const long n = std::lround(r);
    if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-6) {
        throw ConfigError("PulseSet: duration must be an integer number of samples");
    }
    return static_cast<int>(n);
}

bool PulseSet::within_bounds() const {
    for (int j = 0; j < kPulseChannels; ++j) {
        for (double v : channel[j]) {
            if (!(std::abs(v) <= bound[j] * (1.0 + 1e-12))) {
                return false;
            }
        }
    }
    return true;
}

void PulseSet::validate() const {
    const int n = samples();
    for (int j = 0; j < kPulseChannels; ++j) {
        if (static_cast<int>(channel[j].size()) != n) {
            throw DimensionMismatch("PulseSet: channel length differs from duration / dt");
        }
        if (!(bound[j] > 0.0)) {
            throw ConfigError("PulseSet: bounds must be positive");
        }
    }
    if (!within_bounds()) {
        throw ConfigError("PulseSet: sample outside its amplitude bound");
    }
}

void ControlProblem::validate() const {
    const int d = cfg.dim();
    if (drift.rows() != d || drift.cols() != d || source.rows() != d || target.rows() != d ||
        source.cols() != target.cols() || source.cols() == 0) {
        throw DimensionMismatch("ControlProblem: inconsistent dimensions");
    }
    for (const auto& c : controls) {
        if (c.rows() != d || !is_hermitian(c)) {
            throw DimensionMismatch("ControlProblem: controls must be Hermitian on the full space");
        }
    }
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(source.cols(), source.cols());
    if ((source.adjoint() * source - I).cwiseAbs().maxCoeff() > 1e-9 ||
        (target.adjoint() * target - I).cwiseAbs().maxCoeff() > 1e-9) {
        throw NonOrthogonalInput("ControlProblem: source and target kets must be orthonormal");
    }
}

ControlProblem make_control_problem(const HilbertConfig& cfg, const DeviceParams& dev,
                                    const std::vector<std::pair<Ket, Ket>>& pairs, double frame_rate) {
    if (!cfg.include_ancilla) {
        throw DimensionMismatch("make_control_problem: needs the ancilla");
    }
    ControlProblem p;
    p.cfg = cfg;
    p.drift = hamiltonian_int(cfg, dev, frame_rate);
    const Operator a = destroy(cfg);
    p.controls[0] = 0.5 * ancilla_sigma_x(cfg);
    p.controls[1] = 0.5 * ancilla_sigma_y(cfg);
    p.controls[2] = a + a.adjoint();
    p.controls[3] = kI * (a - a.adjoint());
    p.source.resize(cfg.dim(), static_cast<Eigen::Index>(pairs.size()));
    p.target.resize(cfg.dim(), static_cast<Eigen::Index>(pairs.size()));
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        p.source.col(static_cast<Eigen::Index>(i)) = pairs[i].first;
        p.target.col(static_cast<Eigen::Index>(i)) = pairs[i].second;
    }
    p.validate();
    return p;
}

ControlProblem encode_problem(const DeviceParams& dev, int n_max) {
    const HilbertConfig cfg{n_max, true};
    const CodeWords code = binomial_code(cfg.oscillator_only());
    return make_control_problem(cfg, dev,
                                {{fock_ket(cfg, 0, 0), embed_ket(cfg, code.zero_L, 0)},
                                 {fock_ket(cfg, 0, 1), embed_ket(cfg, code.one_L, 0)}});
}

Operator propagate(const ControlProblem& problem, const PulseSet& pulses) {
    pulses.validate();
    Operator U = identity(problem.cfg);
    for (int k = 0; k < pulses.samples(); ++k) {
        U = exponentiate(slice_hamiltonian(problem, pulses, k), pulses.dt).U * U;
    }
    return U;
}

double gate_fidelity(const ControlProblem& problem, const PulseSet& pulses) {
    pulses.validate();
    Eigen::MatrixXcd X = problem.source;
    for (int k = 0; k < pulses.samples(); ++k) {
        X = exponentiate(slice_hamiltonian(problem, pulses, k), pulses.dt).U * X;
    }
    return std::norm(overlap(problem, X));
}

FidelityGradient fidelity_and_gradient(const ControlProblem& problem, const PulseSet& pulses, GradientMethod method) {
    pulses.validate();
    const int n = pulses.samples();
    const double d = problem.subspace_dim();
    std::vector<Slice> slices;
    slices.reserve(n);
    // states[k]: source after k slices.
    std::vector<Eigen::MatrixXcd> states(n + 1);
    states[0] = problem.source;
    for (int k = 0; k < n; ++k) {
        slices.push_back(exponentiate(slice_hamiltonian(problem, pulses, k), pulses.dt));
        states[k + 1] = slices[k].U * states[k];
    }
    const cplx g = overlap(problem, states[n]);

    FidelityGradient out;
    out.fidelity = std::norm(g);
    for (auto& c : out.gradient) {
        c.assign(n, 0.0);
    }
    // back: T^dagger times the slices after k.
    Eigen::MatrixXcd back = problem.target.adjoint();
    const int dim = problem.cfg.dim();
    for (int k = n - 1; k >= 0; --k) {
        const Slice& s = slices[k];
        Eigen::MatrixXcd Q;
        if (method == GradientMethod::kExact) {
            // dg/du_j = tr(A_j V Z^T V^dagger) / d with Z_mn = Gamma_mn (V^dagger X back V)_nm.
            const Eigen::MatrixXcd W = (s.vectors.adjoint() * states[k]) * (back * s.vectors);
            Eigen::MatrixXcd Zt(dim, dim);
            for (int m = 0; m < dim; ++m) {
                for (int l = 0; l < dim; ++l) {
                    Zt(l, m) = divided_difference(s.values(m), s.values(l), pulses.dt) * W(l, m);
                }
            }
            Q = s.vectors * Zt * s.vectors.adjoint();
        } else {
            // dU ~ -i dt (A - (i dt / 2) [H, A]) U, folded into Q as for the exact form.
            const Operator H = slice_hamiltonian(problem, pulses, k);
            const Eigen::MatrixXcd Q1 = states[k + 1] * back;
            Q = -kI * pulses.dt * (Q1 - (0.5 * kI * pulses.dt) * (Q1 * H - H * Q1));
        }
        for (int j = 0; j < kPulseChannels; ++j) {
            const cplx dg = problem.controls[j].cwiseProduct(Q.transpose()).sum() / d;
            out.gradient[j][k] = 2.0 * std::real(std::conj(g) * dg);
        }
        back = back * s.U;
    }
    return out;
}

GrapeResult optimize(const ControlProblem& problem, const PulseSet& init, const GrapeOptions& opts) {
    problem.validate();
    init.validate();
    if (opts.max_iterations < 0 || opts.patience < 1 || opts.memory < 0 || opts.smoothness < 0.0) {
        throw ConfigError("optimize: invalid options");
    }
    GrapeResult res;
    res.pulses = init;
    Objective cur = evaluate(problem, res.pulses, opts, true);
    res.trace.push_back(cur.fidelity);
    if (cur.fidelity >= opts.target_fidelity) {
        res.converged = true;
        return res;
    }
    Eigen::VectorXd x = to_vars(res.pulses);
    std::deque<std::pair<Eigen::VectorXd, Eigen::VectorXd>> mem;
    std::vector<double> values{cur.value};
    PulseSet trial = res.pulses;

    for (int it = 1; it <= opts.max_iterations; ++it) {
        Eigen::VectorXd dir = lbfgs_direction(cur.gradient, mem);
        if (!(dir.dot(cur.gradient) > 0.0) || !dir.allFinite()) {
            mem.clear();
            dir = cur.gradient;
        }
        double step = 1.0;
        if (mem.empty()) {
            const double peak = dir.cwiseAbs().maxCoeff();
            step = peak > 0.0 ? 0.05 / peak : 0.0;
        }
        bool accepted = false;
        Eigen::VectorXd x_new;
        for (int tries = 0; tries < 40 && step > 0.0; ++tries, step *= 0.5) {
            x_new = (x + step * dir).cwiseMax(-1.0).cwiseMin(1.0);
            from_vars(x_new, trial);
            const Objective o = evaluate(problem, trial, opts, false);
            const double predicted = cur.gradient.dot(x_new - x);
            if (o.value >= cur.value + 1e-4 * predicted && o.value > cur.value && o.fidelity >= cur.fidelity) {
                accepted = true;
                break;
            }
        }
        if (!accepted && !mem.empty()) {
            // Curvature memory went stale; retry from plain gradient next iteration.
            mem.clear();
            values.push_back(values.back());
            res.trace.push_back(cur.fidelity);
        } else if (accepted) {
            const Objective next = evaluate(problem, trial, opts, true);
            const Eigen::VectorXd s = x_new - x;
            const Eigen::VectorXd y = cur.gradient - next.gradient;
            if (s.dot(y) > 1e-12 * s.squaredNorm()) {
                mem.emplace_back(s, y);
                if (static_cast<int>(mem.size()) > opts.memory) {
                    mem.pop_front();
                }
            }
            x = x_new;
            res.pulses = trial;
            cur = next;
            values.push_back(cur.value);
            res.trace.push_back(cur.fidelity);
        } else {
            values.push_back(values.back());
            res.trace.push_back(cur.fidelity);
        }
        res.iterations = it;
        if (cur.fidelity >= opts.target_fidelity) {
            res.converged = true;
            return res;
        }
        if (it >= opts.patience && values.back() - values[it - opts.patience] < opts.min_improvement) {
            std::ostringstream msg;
            msg << "optimize: no improvement over " << opts.patience << " iterations (F = " << cur.fidelity << ")";
            throw Stalled(msg.str());
        }
    }
    return res;
}

double pulse_process_fidelity(const ControlProblem& problem, const PulseSet& pulses, const NoiseParams& noise,
                              int substeps) {
    pulses.validate();
    if (substeps < 1) {
        throw ConfigError("pulse_process_fidelity: substeps must be positive");
    }
    // Strang splitting: half-step dissipator, exact slice unitary, half-step dissipator. The
    // decay rates are far below 1/dt, so the splitting error is negligible and positivity holds.
    const double h = pulses.dt / substeps;
    const Operator zero = Operator::Zero(problem.cfg.dim(), problem.cfg.dim());
    const LindbladPropagator half(zero, make_collapse_set(problem.cfg, noise), 0.5 * h);
    std::vector<Operator> slice_u;
    for (int k = 0; k < pulses.samples(); ++k) {
        slice_u.push_back(exponentiate(slice_hamiltonian(problem, pulses, k), h).U);
    }
    const auto inputs = tomography_inputs(TomographySet::kFour);
    std::vector<Qubit2> outputs;
    for (const Qubit2& q : inputs) {
        Operator rho = problem.source * q * problem.source.adjoint();
        for (const Operator& U : slice_u) {
            for (int sub = 0; sub < substeps; ++sub) {
                rho = half.apply(U * half.apply(rho) * U.adjoint());
            }
        }
        outputs.push_back(problem.target.adjoint() * rho * problem.target);
    }
    const ChiMatrix chi = chi_from_io(inputs, outputs);
    return normalize_fidelity(chi.chi(0, 0).real());
}

void write_pulse_csv(const std::string& path, const PulseSet& pulses) {
    pulses.validate();
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("write_pulse_csv: cannot open " + path);
    }
    out << "t,qubit_i,qubit_q,cavity_i,cavity_q\n" << std::setprecision(17);
    for (int k = 0; k < pulses.samples(); ++k) {
        out << k * pulses.dt;
        for (int j = 0; j < kPulseChannels; ++j) {
            out << ',' << pulses.channel[j][k];
        }
        out << '\n';
    }
}

PulseSet read_pulse_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("read_pulse_csv: cannot open " + path);
    }
    std::string line;
    std::getline(in, line);
    if (line.rfind("t,qubit_i,qubit_q,cavity_i,cavity_q", 0) != 0) {
        throw ConfigError("read_pulse_csv: unexpected header in " + path);
    }
    std::vector<double> t;
    std::array<std::vector<double>, kPulseChannels> ch;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(row, cell, ',')) {
            v.push_back(std::stod(cell));
        }
        if (v.size() != kPulseChannels + 1) {
            throw ConfigError("read_pulse_csv: expected 5 columns in " + path);
        }
        t.push_back(v[0]);
        for (int j = 0; j < kPulseChannels; ++j) {
            ch[j].push_back(v[j + 1]);
        }
    }
    if (t.size() < 2) {
        throw ConfigError("read_pulse_csv: need at least two samples");
    }
    PulseSet p;
    p.dt = t[1] - t[0];
    p.duration = p.dt * static_cast<double>(t.size());
    p.channel = ch;
    p.validate();
    return p;
}

}  // namespace bqec
