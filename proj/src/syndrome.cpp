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

#include "bqec/syndrome.hpp"

#include <algorithm>
#include <cmath>

#include "bqec/errors.hpp"

namespace bqec {

ParityFidelities parity_fidelity_model(double C0, double C1, double chi_qs, double T1, double T_phi, double T_BM,
                                       double T_AM) {
    const double half_wait = kPi / (2.0 * chi_qs);
    const double decay = half_wait / T1;
    const double dephase = half_wait / T_phi;
    return {C0 - decay - dephase, C1 - decay - (T_AM + T_BM) / T1 - dephase};
}

ParityFidelities parity_fidelity_model(const DeviceParams& dev, const NoiseParams& noise) {
    return parity_fidelity_model(dev.meas.C0, dev.meas.C1, dev.chi_qs, noise.T1, noise.T_phi, dev.meas.T_BM,
                                 dev.meas.T_AM);
}

MeasurementModel calibrated_measurement(const DeviceParams& dev, const NoiseParams& noise) {
    MeasurementModel m = dev.meas;
    const ParityFidelities f = parity_fidelity_model(dev, noise);
    m.P_e = std::clamp(f.F0, 0.0, 1.0);
    m.P_o = std::clamp(f.F1, 0.0, 1.0);
    return m;
}

std::vector<Operator> amplitude_damping_kraus(const HilbertConfig& osc, double gamma) {
    const int d = osc.osc_dim();
    if (gamma < 0.0 || gamma > 1.0) {
        throw DomainError("amplitude_damping_kraus: gamma outside [0, 1]");
    }
    if (gamma == 0.0) {
        return {Operator::Identity(d, d)};
    }
    std::vector<Operator> out;
    for (int k = 0; k < d; ++k) {
        Operator K = Operator::Zero(d, d);
        for (int n = k; n < d; ++n) {
            // sqrt(binom(n, k) (1 - gamma)^(n - k) gamma^k)
            const double log_w = std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) +
                                 (n - k) * std::log1p(-gamma) + k * std::log(gamma);
            K(n - k, n) = std::exp(0.5 * log_w);
        }
        out.push_back(K);
    }
    return out;
}

ParityMeter::ParityMeter(const HilbertConfig& cfg, const DeviceParams& dev, const NoiseParams& noise,
                         const MeasurementModel& model, double frame_rate)
    : cfg_(cfg), model_(model), wait_(dev.parity_wait()) {
    if (!cfg.include_ancilla) {
        throw DimensionMismatch("ParityMeter: the measurement needs the ancilla");
    }
    model.validate();
    const HilbertConfig osc = cfg.oscillator_only();
    const Operator parity = embed_oscillator(cfg, parity_op(osc));
    const Operator id = identity(cfg);
    parity_proj_ = {(id + parity) / 2.0, (id - parity) / 2.0};
    ancilla_proj_ = {ancilla_projector(cfg, 0), ancilla_projector(cfg, 1)};
    const Operator lower = ancilla_lowering(cfg);
    const Operator raise = ancilla_raising(cfg);
    shift_[0] = {ancilla_proj_[0], raise};
    shift_[1] = {lower, ancilla_proj_[1]};
    half_pi_ = ancilla_rotation(cfg, kPi / 2.0, kPi / 2.0);
    half_pi_inv_ = ancilla_rotation(cfg, -kPi / 2.0, kPi / 2.0);
    for (const Operator& k : amplitude_damping_kraus(osc, model.p_d)) {
        damping_.push_back(embed_oscillator(cfg, k));
    }
    const Operator H = hamiltonian_int(cfg, dev, frame_rate);
    const CollapseSet c = make_collapse_set(cfg, noise);
    wait_jump_ = JumpEvolver(H, c);
    before_jump_ = JumpEvolver(H, c);
    after_jump_ = JumpEvolver(H, c);
    wait_map_ = LindbladPropagator(H, c, wait_);
    before_map_ = LindbladPropagator(H, c, model.T_BM);
    after_map_ = LindbladPropagator(H, c, model.T_AM);
}

double ParityMeter::flip_probability(int raw) const { return raw == 0 ? 1.0 - model_.P_e : 1.0 - model_.P_o; }

void ParityMeter::demolish(Ket& psi, Rng& rng) const {
    if (damping_.size() == 1) {
        return;
    }
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    for (std::size_t k = 0; k < damping_.size(); ++k) {
        Ket out = damping_[k] * psi;
        const double p = out.squaredNorm();
        if (u < p || k + 1 == damping_.size()) {
            psi = out / std::sqrt(p);
            return;
        }
        u -= p;
    }
}

Operator ParityMeter::demolish(const Operator& rho) const {
    if (damping_.size() == 1) {
        return rho;
    }
    Operator out = Operator::Zero(rho.rows(), rho.cols());
    for (const Operator& K : damping_) {
        out += K * rho * K.adjoint();
    }
    return out;
}

int ParityMeter::scalar(Ket& psi, Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::array<Ket, 4> sectors;
    std::array<double, 4> weights;
    for (int s = 0; s < 4; ++s) {
        sectors[s] = ancilla_proj_[s % 2] * (parity_proj_[s / 2] * psi);
        weights[s] = sectors[s].squaredNorm();
    }
    const int pick = std::discrete_distribution<int>(weights.begin(), weights.end())(rng);
    const int parity = pick / 2;
    const int anc = pick % 2;
    Ket sector = sectors[pick];
    sector.normalize();
    const int raw = parity ^ anc;
    const int reported = (unif(rng) < flip_probability(raw)) ? 1 - raw : raw;
    psi = shift_[anc][reported] * sector;
    demolish(psi, rng);
    return reported;
}

int ParityMeter::microscopic(Ket& psi, Rng& rng) const {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    psi = half_pi_ * psi;
    wait_jump_.evolve(psi, wait_, rng);
    psi = half_pi_inv_ * psi;
    before_jump_.evolve(psi, model_.T_BM, rng);
    Ket g = ancilla_proj_[0] * psi;
    const int anc = (unif(rng) < g.squaredNorm()) ? 0 : 1;
    psi = ancilla_proj_[anc] * psi;
    psi.normalize();
    const double flip = anc == 0 ? 1.0 - model_.C0 : 1.0 - model_.C1;
    const int reported = (unif(rng) < flip) ? 1 - anc : anc;
    after_jump_.evolve(psi, model_.T_AM, rng);
    demolish(psi, rng);
    return reported;
}

int ParityMeter::measure(Ket& psi, Rng& rng, MeasureMode mode) const {
    if (psi.size() != cfg_.dim()) {
        throw DimensionMismatch("ParityMeter::measure: state dimension");
    }
    return mode == MeasureMode::kScalar ? scalar(psi, rng) : microscopic(psi, rng);
}

std::array<Operator, 2> ParityMeter::measure(const Operator& rho, MeasureMode mode) const {
    if (rho.rows() != cfg_.dim() || rho.cols() != cfg_.dim()) {
        throw DimensionMismatch("ParityMeter::measure: state dimension");
    }
    const int d = cfg_.dim();
    std::array<Operator, 2> out = {Operator::Zero(d, d), Operator::Zero(d, d)};
    if (mode == MeasureMode::kScalar) {
        for (int p = 0; p < 2; ++p) {
            for (int a = 0; a < 2; ++a) {
                const Operator Q = ancilla_proj_[a] * parity_proj_[p];
                const Operator sector = Q * rho * Q.adjoint();
                const int raw = p ^ a;
                const double flip = flip_probability(raw);
                for (int r = 0; r < 2; ++r) {
                    const double w = (r == raw) ? 1.0 - flip : flip;
                    out[r] += w * shift_[a][r] * sector * shift_[a][r].adjoint();
                }
            }
        }
    } else {
        Operator s = half_pi_ * rho * half_pi_.adjoint();
        s = wait_map_.apply(s);
        s = half_pi_inv_ * s * half_pi_inv_.adjoint();
        s = before_map_.apply(s);
        for (int a = 0; a < 2; ++a) {
            const Operator sector = ancilla_proj_[a] * s * ancilla_proj_[a];
            const double flip = a == 0 ? 1.0 - model_.C0 : 1.0 - model_.C1;
            out[a] += (1.0 - flip) * sector;
            out[1 - a] += flip * sector;
        }
        for (Operator& o : out) {
            o = after_map_.apply(o);
        }
    }
    for (Operator& o : out) {
        o = demolish(o);
    }
    return out;
}

ParityFidelities microscopic_parity_fidelities(const HilbertConfig& cfg, const DeviceParams& dev,
                                               const NoiseParams& noise, const MeasurementModel& model) {
    const HilbertConfig joint = cfg.with_ancilla();
    const ParityMeter meter(joint, dev, noise, model);
    const Ket even = (fock_ket(joint, 0) + fock_ket(joint, 4)) / std::sqrt(2.0);
    const Ket odd = (fock_ket(joint, 1) + fock_ket(joint, 3)) / std::sqrt(2.0);
    double f[2];
    const Ket* in[2] = {&even, &odd};
    for (int p = 0; p < 2; ++p) {
        const auto branches = meter.measure(Operator((*in[p]) * in[p]->adjoint()), MeasureMode::kMicroscopic);
        f[p] = (ancilla_projector(joint, p) * branches[p]).trace().real();
    }
    return {f[0], f[1]};
}

double qnd_parity_model(double t, double alpha_sq, double tau_tot, double n_th, double P_e, double P_o) {
    const double s = 1.0 + 2.0 * n_th;
    const double p0 = std::exp(-2.0 * alpha_sq * std::exp(-t / tau_tot) / s) / s;
    return 0.5 * (1.0 + p0) * (2.0 * P_e - 1.0) + 0.5 * (1.0 - p0) * (1.0 - 2.0 * P_o);
}

QndCurve qnd_parity_decay(cplx alpha, double tau_rep, const MeasurementModel& model, const NoiseParams& noise,
                          double t_max, const QndOptions& opts) {
    if (alpha == 0.0) {
        throw DomainError("qnd_parity_decay: alpha must be nonzero");
    }
    if (!(tau_rep > 0.0) || !(t_max > tau_rep)) {
        throw DomainError("qnd_parity_decay: need 0 < tau_rep < t_max");
    }
    const HilbertConfig osc{opts.n_max, false};
    const Ket coherent = displacement(osc, alpha) * fock_ket(osc, 0);
    Operator rho = coherent * coherent.adjoint();
    const Operator H = Operator::Zero(osc.dim(), osc.dim());
    const LindbladPropagator interval(H, make_collapse_set(osc, noise), tau_rep);
    const std::vector<Operator> kraus = amplitude_damping_kraus(osc, model.p_d);
    const Operator parity = parity_op(osc);

    const int reps = static_cast<int>(std::floor(t_max / tau_rep + 1e-9));
    const int stride = std::max(1, (reps + opts.max_points - 1) / opts.max_points);
    Rng rng(trajectory_seed(opts.seed, static_cast<std::uint64_t>(std::llround(tau_rep * 1e12))));
    QndCurve curve;
    curve.tau_rep = tau_rep;
    for (int k = 0; k <= reps; ++k) {
        if (k % stride == 0) {
            const double p_even = 0.5 * (1.0 + (parity * rho).trace().real());
            const double q = p_even * model.P_e + (1.0 - p_even) * (1.0 - model.P_o);
            double value = 2.0 * q - 1.0;
            if (opts.shots > 0) {
                std::binomial_distribution<int> shots(opts.shots, std::clamp(q, 0.0, 1.0));
                value = 2.0 * shots(rng) / opts.shots - 1.0;
            }
            curve.t.push_back(k * tau_rep);
            curve.parity.push_back(value);
        }
        Operator kicked = Operator::Zero(rho.rows(), rho.cols());
        for (const Operator& K : kraus) {
            kicked += K * rho * K.adjoint();
        }
        rho = interval.apply(kicked);
    }
    const double a2 = std::norm(alpha);
    const CurveModel fn = [&](double t, const Eigen::VectorXd& p) {
        return qnd_parity_model(t, a2, p(0), p(1), model.P_e, model.P_o);
    };
    Eigen::VectorXd guess(2);
    guess << noise.tau_s(), 0.01;
    curve.fit = fit_curve(fn, curve.t, curve.parity, guess);
    curve.tau_tot = curve.fit.params(0);
    curve.n_th = curve.fit.params(1);
    return curve;
}

QndCalibration qnd_calibrate(cplx alpha, const std::vector<double>& tau_reps, const MeasurementModel& model,
                             const NoiseParams& noise, double t_max, const QndOptions& opts) {
    if (tau_reps.size() < 2) {
        throw DomainError("qnd_calibrate: need at least two repetition intervals");
    }
    QndCalibration cal;
    Eigen::MatrixXd A(tau_reps.size(), 2);
    Eigen::VectorXd b(tau_reps.size());
    for (std::size_t i = 0; i < tau_reps.size(); ++i) {
        cal.curves.push_back(qnd_parity_decay(alpha, tau_reps[i], model, noise, t_max, opts));
        A(i, 0) = 1.0;
        A(i, 1) = 1.0 / tau_reps[i];
        b(i) = 1.0 / cal.curves.back().tau_tot;
    }
    const Eigen::Vector2d x = A.colPivHouseholderQr().solve(b);
    cal.tau_s = 1.0 / x(0);
    cal.p_d = x(1);
    return cal;
}

}  // namespace bqec
