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

#include "bqec/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <functional>
#include <limits>
#include <thread>

#include "bqec/errors.hpp"

namespace bqec {

namespace {

typedef std::array<Operator, 4> Bundle;
typedef std::array<Operator, 4> Paulis;

Paulis paulis_on(const Ket& b0, const Ket& b1) {
    Paulis p;
    for (int i = 0; i < 4; ++i) {
        p[i] = subspace_pauli(b0, b1, i);
    }
    return p;
}

// rho -> F rho + (1 - F) * (uniform Pauli twirl on the subspace).
Operator depolarize(const Operator& rho, const Paulis& p, double F) {
    if (F >= 1.0) {
        return rho;
    }
    Operator twirl = Operator::Zero(rho.rows(), rho.cols());
    for (const Operator& s : p) {
        twirl += s * rho * s.adjoint();
    }
    return F * rho + (1.0 - F) * 0.25 * twirl;
}

void depolarize(Ket& psi, const Paulis& p, double F, Rng& rng) {
    if (F >= 1.0) {
        return;
    }
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    if (unif(rng) < 1.0 - F) {
        const int k = std::uniform_int_distribution<int>(0, 3)(rng);
        psi = p[k] * psi;
    }
}

double rb_to_normalized(double F_rb) { return std::clamp(1.0 - 2.0 * (1.0 - F_rb), 0.0, 1.0); }

Qubit2 rotation2(double angle, double phase) {
    const double c = std::cos(angle / 2.0);
    const double s = std::sin(angle / 2.0);
    const cplx e = std::exp(kI * phase);
    Qubit2 m;
    m << c, -kI * s * std::conj(e), -kI * s * e, c;
    return m;
}

Operator joint_input(const HilbertConfig& cfg, const Qubit2& q) {
    Operator rho = Operator::Zero(cfg.dim(), cfg.dim());
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            rho(cfg.index(0, a), cfg.index(0, b)) = q(a, b);
        }
    }
    return rho;
}

std::uint64_t combine(std::uint64_t a, std::uint64_t b) { return trajectory_seed(a, b); }

}  // namespace

ErrorSources ErrorSources::intrinsic_only() {
    ErrorSources s;
    s.detection = false;
    s.recovery = false;
    s.ancilla = false;
    s.pi_pulse = false;
    s.encode = false;
    return s;
}

void ProtocolConfig::validate() const {
    if (steps_per_round < 1 || steps_per_round > 6) {
        throw ConfigError("ProtocolConfig: steps_per_round must be in 1..6");
    }
    if (!(t_w > 0.0)) {
        throw ConfigError("ProtocolConfig: t_w must be positive");
    }
    if (n_rounds < 0) {
        throw ConfigError("ProtocolConfig: n_rounds must be >= 0");
    }
    if (n_max < 5) {
        throw ConfigError("ProtocolConfig: n_max must be >= 5 for the binomial code");
    }
    if (mode == EngineMode::kTrajectory && trajectories < 1) {
        throw ConfigError("ProtocolConfig: trajectories must be >= 1");
    }
}

double BranchResult::normalized_fidelity() const { return normalize_fidelity(std::clamp(chi.process_fidelity(), 0.25, 1.0)); }

struct QecEngine::Impl {
    ProtocolConfig pc;
    DeviceParams dev;
    NoiseParams noise;
    FidelityModel fm;
    MeasurementModel meas;
    HilbertConfig cfg;
    HilbertConfig osc;
    ProtocolTiming timing;
    GateSet gates;
    RecoverySet rs;
    int steps = 2;

    Operator EN;
    Operator DE;
    Operator flip;
    std::vector<Operator> odd_gate;
    Operator even_gate;
    std::vector<Paulis> odd_target;
    std::vector<Paulis> pi_target;
    Paulis code_target;
    Paulis decode_target;
    std::vector<double> odd_fidelity;
    double even_fidelity = 1.0;

    Operator H;
    CollapseSet c;
    LindbladPropagator slot_map;
    LindbladPropagator wait_map;
    LindbladPropagator window_map;
    JumpEvolver evolver;
    std::unique_ptr<ParityMeter> meter;
    std::vector<Qubit2> inputs;
    Operator parity_even;
    Operator parity_odd;

    Impl(const ProtocolConfig& cfg_in, const DeviceParams& dev_in, const NoiseParams& noise_in,
         const FidelityModel& fm_in)
        : pc(cfg_in), dev(dev_in), noise(noise_in), fm(fm_in) {
        pc.validate();
        fm.validate();
        const ErrorSources& s = pc.sources;
        if (!s.kerr) {
            dev.K_s = 0.0;
            dev.K_s_prime = 0.0;
        }
        if (!s.cavity_loss) {
            noise.kappa_s = 0.0;
            noise.n_th_s = 0.0;
        }
        meas = dev.meas;
        meas.P_e = fm.F0;
        meas.P_o = fm.F1;
        meas.C0 = fm.C0;
        meas.C1 = fm.C1;
        if (!s.detection) {
            meas.P_e = meas.P_o = meas.C0 = meas.C1 = 1.0;
            meas.p_d = 0.0;
        }
        if (!s.recovery) {
            fm = fm.with_recovery(1.0);
        }
        if (!s.pi_pulse) {
            fm.F_pi = 1.0;
        }
        if (!s.encode) {
            fm.F_encode = fm.F_decode = 1.0;
        }
        steps = pc.steps_per_round;
        cfg = HilbertConfig{pc.n_max, true};
        osc = cfg.oscillator_only();
        timing = default_timing(dev, pc.t_w);
        gates = make_gates(cfg, dev, noise, pc.t_w);
        rs = make_recovery_set(osc, dev, noise, timing, steps);
        EN = gates.EN;
        DE = gates.DE;
        flip = ancilla_sigma_x(cfg);

        // Microscopic readout leaves the odd branch with a dispersive phase over T_BM + T_AM.
        Operator compensation = identity(osc);
        if (pc.measurement == MeasureMode::kMicroscopic) {
            compensation = expm(number(osc), dev.chi_qs * (meas.T_BM + meas.T_AM));
        }
        const CodeWords& code = gates.code;
        for (int k = 0; k < steps; ++k) {
            odd_gate.push_back(embed_oscillator(cfg, rs.odd[k] * compensation));
            const CodeWords& target = (k == steps - 1) ? code : rs.deformed[k];
            odd_target.push_back(paulis_on(embed_ket(cfg, target.zero_L, 0), embed_ket(cfg, target.one_L, 0)));
            pi_target.push_back(
                paulis_on(embed_ket(cfg, rs.error_basis[k].zero_L, 0), embed_ket(cfg, rs.error_basis[k].one_L, 0)));
            const bool last = (k == steps - 1);
            odd_fidelity.push_back(last && steps > 1 ? fm.F_U4 : fm.F_U2);
        }
        even_gate = embed_oscillator(cfg, rs.even_final);
        even_fidelity = steps == 1 ? fm.F_U1 : fm.F_U3;
        code_target = paulis_on(embed_ket(cfg, code.zero_L, 0), embed_ket(cfg, code.one_L, 0));
        decode_target = paulis_on(fock_ket(cfg, 0, 0), fock_ket(cfg, 0, 1));

        H = hamiltonian_int(cfg, dev, four_photon_frame_rate(dev));
        CollapseOptions opts;
        opts.ancilla_decay = opts.ancilla_excitation = opts.ancilla_dephasing = s.ancilla;
        c = make_collapse_set(cfg, noise, opts);
        if (pc.mode == EngineMode::kDensityMatrix || pc.mode == EngineMode::kScalarModel) {
            slot_map = LindbladPropagator(H, c, timing.gate_slot);
            wait_map = LindbladPropagator(H, c, timing.t_w);
            window_map = LindbladPropagator(H, c, timing.measure_window);
        } else {
            evolver = JumpEvolver(H, c);
        }
        // Microscopic readout keeps ancilla decoherence as the detection mechanism.
        NoiseParams meter_noise = noise;
        if (!s.detection) {
            meter_noise.T1 = meter_noise.T_phi = std::numeric_limits<double>::infinity();
            meter_noise.n_th_q = 0.0;
        }
        meter = std::make_unique<ParityMeter>(cfg, dev, meter_noise, meas, four_photon_frame_rate(dev));
        inputs = tomography_inputs(TomographySet::kFour);
        const Operator P = embed_oscillator(cfg, parity_op(osc));
        parity_even = (identity(cfg) + P) / 2.0;
        parity_odd = (identity(cfg) - P) / 2.0;
    }

    // ---- density-matrix path ----

    Operator encode(const Qubit2& q) const {
        const Operator rho = EN * joint_input(cfg, q) * EN.adjoint();
        return depolarize(rho, code_target, fm.F_encode);
    }

    Qubit2 decode(const Operator& rho) const {
        const Operator out = depolarize(DE * rho * DE.adjoint(), decode_target, fm.F_decode);
        return trace_out_oscillator(cfg, out);
    }

    struct Branch {
        std::string reported;
        std::string truth;
        Bundle rho;
    };

    Operator after_detection(const Operator& rho, int k, int reported) const {
        Operator r = rho;
        if (reported == 1) {
            r = flip * r * flip;
            r = depolarize(r, pi_target[k], fm.F_pi);
        }
        if (pc.measurement == MeasureMode::kScalar) {
            r = window_map.apply(r);
        }
        if (reported == 1) {
            r = odd_gate[k] * r * odd_gate[k].adjoint();
            r = depolarize(r, odd_target[k], odd_fidelity[k]);
        } else if (k == steps - 1) {
            r = even_gate * r * even_gate.adjoint();
            r = depolarize(r, code_target, even_fidelity);
        }
        return r;
    }

    std::vector<Branch> step(const std::vector<Branch>& in, int k) const {
        std::vector<Branch> out;
        for (const Branch& b : in) {
            std::array<Bundle, 2> split[2];
            for (int i = 0; i < 4; ++i) {
                if (b.rho[i].size() == 0) {
                    continue;
                }
                const Operator r = wait_map.apply(slot_map.apply(b.rho[i]));
                const Operator sector[2] = {parity_even * r * parity_even, parity_odd * r * parity_odd};
                for (int p = 0; p < 2; ++p) {
                    const auto m = meter->measure(sector[p], pc.measurement);
                    for (int rep = 0; rep < 2; ++rep) {
                        split[p][rep][i] = after_detection(m[rep], k, rep);
                    }
                }
            }
            for (int p = 0; p < 2; ++p) {
                for (int rep = 0; rep < 2; ++rep) {
                    out.push_back({b.reported + char('0' + rep), b.truth + char('0' + p), split[p][rep]});
                }
            }
        }
        return out;
    }

    Bundle merge(const std::vector<Branch>& branches) const {
        Bundle sum;
        for (int i = 0; i < 4; ++i) {
            sum[i] = Operator::Zero(cfg.dim(), cfg.dim());
            for (const Branch& b : branches) {
                if (b.rho[i].size() != 0) {
                    sum[i] += b.rho[i];
                }
            }
        }
        return sum;
    }

    ChiMatrix chi_of(const Bundle& bundle) const {
        std::vector<Qubit2> outputs;
        for (const Operator& r : bundle) {
            outputs.push_back(decode(r));
        }
        return chi_from_io(inputs, outputs);
    }

    std::map<std::string, BranchResult> resolve(const std::vector<Branch>& branches, bool by_truth) const {
        std::map<std::string, std::vector<Branch>> groups;
        for (const Branch& b : branches) {
            groups[by_truth ? b.truth : b.reported].push_back(b);
        }
        std::map<std::string, BranchResult> out;
        for (const auto& [label, list] : groups) {
            const Bundle sum = merge(list);
            const ChiMatrix chi = chi_of(sum);
            BranchResult r;
            r.probability = chi.trace();
            r.probability_representative = sum[2].trace().real();
            if (r.probability > 1e-14) {
                r.chi = chi.normalized();
            }
            out[label] = r;
        }
        return out;
    }

    double round_time(TimeAxis axis) const {
        return axis == TimeAxis::kWaitsOnly ? steps * timing.t_w : steps * timing.step();
    }

    void fill_times(QecResult& res) const {
        for (int n = 0; n <= pc.n_rounds; ++n) {
            res.time_full.push_back(n * round_time(TimeAxis::kFullDuration));
            res.time_waits.push_back(n * round_time(TimeAxis::kWaitsOnly));
        }
        res.time = pc.time_axis == TimeAxis::kWaitsOnly ? res.time_waits : res.time_full;
    }

    QecResult run_density() const {
        QecResult res;
        fill_times(res);
        Bundle state;
        for (int i = 0; i < 4; ++i) {
            state[i] = encode(inputs[i]);
        }
        auto record = [&](const Bundle& b) {
            const ChiMatrix chi = chi_of(b);
            res.chi.push_back(chi);
            res.fidelity.push_back(chi.process_fidelity());
        };
        record(state);
        for (int n = 0; n < pc.n_rounds; ++n) {
            std::vector<Branch> branches{{"", "", state}};
            for (int k = 0; k < steps; ++k) {
                branches = step(branches, k);
            }
            if (n == 0) {
                res.reported_branches = resolve(branches, false);
                res.true_branches = resolve(branches, true);
            }
            state = merge(branches);
            record(state);
        }
        return res;
    }

    /// Rounds applied to one encoded state; callback after every round (including zero).
    void evolve_rounds(Operator rho, int rounds, const std::function<void(int, const Operator&)>& each) const {
        each(0, rho);
        for (int n = 0; n < rounds; ++n) {
            std::vector<Branch> branches;
            // Only slot 0 is populated; step() skips the empty slots.
            Bundle b;
            b[0] = rho;
            branches.push_back({"", "", b});
            for (int k = 0; k < steps; ++k) {
                branches = step(branches, k);
            }
            rho = merge(branches)[0];
            each(n + 1, rho);
        }
    }

    // ---- trajectory path ----

    Ket encode(const Eigen::Vector2cd& q, Rng& rng) const {
        Ket psi = Ket::Zero(cfg.dim());
        psi(cfg.index(0, 0)) = q(0);
        psi(cfg.index(0, 1)) = q(1);
        psi = EN * psi;
        depolarize(psi, code_target, fm.F_encode, rng);
        return psi;
    }

    void idle(Ket& psi, double duration, Rng& rng) const {
        if (duration > 0.0) {
            evolver.evolve(psi, duration, rng);
        }
    }

    std::vector<int> round(Ket& psi, Rng& rng, RoundRecord* rec) const {
        std::vector<int> outcomes;
        for (int k = 0; k < steps; ++k) {
            idle(psi, timing.gate_slot, rng);
            idle(psi, timing.t_w, rng);
            const int r = meter->measure(psi, rng, pc.measurement);
            outcomes.push_back(r);
            if (r == 1) {
                psi = flip * psi;
                depolarize(psi, pi_target[k], fm.F_pi, rng);
            }
            if (pc.measurement == MeasureMode::kScalar) {
                idle(psi, timing.measure_window, rng);
            }
            std::string gate = "none";
            if (r == 1) {
                psi = odd_gate[k] * psi;
                depolarize(psi, odd_target[k], odd_fidelity[k], rng);
                gate = (k == steps - 1 && steps > 1) ? "U4" : "U2";
            } else if (k == steps - 1) {
                psi = even_gate * psi;
                depolarize(psi, code_target, even_fidelity, rng);
                gate = steps == 1 ? "U1" : "U3";
            }
            psi.normalize();
            if (rec) {
                rec->outcomes.push_back(r);
                rec->gates.push_back(gate);
                rec->branch += char('0' + r);
            }
        }
        return outcomes;
    }

    std::vector<Qubit2> run_state(const Eigen::Vector2cd& logical, std::uint64_t index,
                                  std::vector<RoundRecord>* records, std::string* first) const {
        Rng rng(trajectory_seed(pc.seed, index));
        Ket psi = encode(logical, rng);
        std::vector<Qubit2> out;
        out.push_back(decode(Operator(psi * psi.adjoint())));
        for (int n = 0; n < pc.n_rounds; ++n) {
            RoundRecord rec;
            const std::vector<int> o = round(psi, rng, &rec);
            rec.elapsed = (n + 1) * round_time(TimeAxis::kFullDuration);
            if (n == 0 && first) {
                *first = rec.branch;
            }
            if (records) {
                records->push_back(rec);
            }
            out.push_back(decode(Operator(psi * psi.adjoint())));
        }
        return out;
    }

    QecResult run_trajectory() const {
        QecResult res;
        fill_times(res);
        const int M = pc.trajectories;
        const int rounds = pc.n_rounds;
        const std::vector<Eigen::Vector2cd> kets = {
            Eigen::Vector2cd(1, 0), Eigen::Vector2cd(0, 1), Eigen::Vector2cd(1, 1) / std::sqrt(2.0),
            Eigen::Vector2cd(1, kI) / std::sqrt(2.0)};
        const std::size_t total = 4 * static_cast<std::size_t>(M);
        std::vector<std::vector<Qubit2>> outputs(total);
        std::vector<std::string> first(total);
        std::vector<std::vector<RoundRecord>> recs(total);
        auto work = [&](std::size_t begin, std::size_t end) {
            for (std::size_t j = begin; j < end; ++j) {
                const std::size_t input = j / M;
                const bool keep = static_cast<int>(j % M) < pc.record_limit && input == 0;
                outputs[j] = run_state(kets[input], combine(input, j % M), keep ? &recs[j] : nullptr, &first[j]);
            }
        };
        const int threads = pc.threads > 0 ? pc.threads : std::max(1u, std::thread::hardware_concurrency());
        if (threads <= 1) {
            work(0, total);
        } else {
            std::vector<std::thread> pool;
            const std::size_t chunk = (total + threads - 1) / threads;
            for (int t = 0; t < threads; ++t) {
                const std::size_t b = std::min(total, t * chunk);
                const std::size_t e = std::min(total, b + chunk);
                pool.emplace_back(work, b, e);
            }
            for (auto& th : pool) {
                th.join();
            }
        }
        // Ordered reduction keeps results independent of the thread count.
        for (int n = 0; n <= rounds; ++n) {
            std::vector<Qubit2> avg(4, Qubit2::Zero());
            for (std::size_t j = 0; j < total; ++j) {
                avg[j / M] += outputs[j][n] / static_cast<double>(M);
            }
            const ChiMatrix chi = chi_from_io(inputs, avg);
            res.chi.push_back(chi);
            res.fidelity.push_back(chi.process_fidelity());
        }
        for (std::size_t j = 0; j < total; ++j) {
            if (!first[j].empty()) {
                ++res.outcome_counts[first[j]];
            }
            for (RoundRecord& r : recs[j]) {
                res.records.push_back(r);
            }
        }
        res.trajectories = static_cast<long>(total);
        return res;
    }

    QecResult run_scalar() const {
        QecResult res;
        fill_times(res);
        const IntrinsicPoint p = intrinsic_point(dev, noise, steps, pc.t_w, pc.n_max);
        const double F_round = nstep_model(fm, p, pc.time_axis);
        const double round_trip = fm.F_encode * fm.F_decode;
        for (int n = 0; n <= pc.n_rounds; ++n) {
            res.fidelity.push_back(chi_from_normalized(round_trip * std::pow(F_round, n)));
        }
        for (const auto& [label, w] : p.probability) {
            BranchResult b;
            b.probability = w;
            b.probability_representative = w;
            res.reported_branches[label] = b;
        }
        return res;
    }
};

QecEngine::QecEngine(const ProtocolConfig& cfg, const DeviceParams& dev, const NoiseParams& noise,
                     const FidelityModel& fm)
    : impl_(std::make_unique<Impl>(cfg, dev, noise, fm)) {}

QecEngine::~QecEngine() = default;

QecResult QecEngine::run() const {
    switch (impl_->pc.mode) {
        case EngineMode::kDensityMatrix:
            return impl_->run_density();
        case EngineMode::kTrajectory:
            return impl_->run_trajectory();
        case EngineMode::kScalarModel:
            return impl_->run_scalar();
    }
    return {};
}

std::vector<Qubit2> QecEngine::run_state(const Eigen::Vector2cd& logical, std::uint64_t trajectory,
                                         std::vector<RoundRecord>* records) const {
    if (impl_->pc.mode != EngineMode::kTrajectory) {
        throw ConfigError("QecEngine::run_state: needs trajectory mode");
    }
    return impl_->run_state(logical.normalized(), trajectory, records, nullptr);
}

const ProtocolTiming& QecEngine::timing() const { return impl_->timing; }
const GateSet& QecEngine::gates() const { return impl_->gates; }
const HilbertConfig& QecEngine::config() const { return impl_->cfg; }

QecResult run_qec(const ProtocolConfig& cfg, const DeviceParams& dev, const NoiseParams& noise,
                  const FidelityModel& fm) {
    return QecEngine(cfg, dev, noise, fm).run();
}

std::vector<Qubit2> run_qec_state(const Eigen::Vector2cd& logical, const ProtocolConfig& cfg, const DeviceParams& dev,
                                  const NoiseParams& noise, const FidelityModel& fm,
                                  std::vector<RoundRecord>* records) {
    ProtocolConfig c = cfg;
    c.mode = EngineMode::kTrajectory;
    return QecEngine(c, dev, noise, fm).run_state(logical, 0, records);
}

IntrinsicPoint intrinsic_point(const DeviceParams& dev, const NoiseParams& noise, int steps, double t_w, int n_max) {
    ProtocolConfig pc;
    pc.steps_per_round = steps;
    pc.t_w = t_w;
    pc.n_rounds = 1;
    pc.n_max = n_max;
    pc.mode = EngineMode::kDensityMatrix;
    pc.sources = ErrorSources::intrinsic_only();
    QecEngine engine(pc, dev, noise, FidelityModel::from_device(dev, noise));
    const QecResult r = engine.run();
    IntrinsicPoint p;
    p.t_w = t_w;
    p.steps = steps;
    p.T_w_waits = steps * t_w;
    p.T_w_full = steps * engine.timing().step();
    for (const auto& [label, b] : r.reported_branches) {
        p.probability[label] = b.probability_representative;
        p.fidelity[label] = b.probability > 1e-14 ? b.normalized_fidelity() : 0.0;
    }
    return p;
}

FitResult fit_lifetime(const std::vector<double>& t, const std::vector<double>& F_chi) {
    return fit_exponential(t, F_chi, FitForm::kExponential);
}

double four_photon_kerr_period(const DeviceParams& dev) { return kTwoPi / std::abs(kerr_energy(dev, 4)); }

double transmon_process_fidelity(const NoiseParams& noise, double t) {
    return 0.25 * (1.0 + std::exp(-t / noise.T1) + 2.0 * std::exp(-t / noise.T2()));
}

DecayCurve run_uncorrected(Encoding encoding, const DeviceParams& dev, const NoiseParams& noise,
                           const UncorrectedOptions& opts) {
    DecayCurve curve;
    const std::vector<Qubit2> inputs = tomography_inputs();
    if (encoding == Encoding::kTransmon) {
        // Bare ancilla; the oscillator stays in vacuum with loss disabled.
        const HilbertConfig q{1, true};
        CollapseOptions co;
        co.photon_loss = co.photon_gain = false;
        const LindbladPropagator step(Operator::Zero(q.dim(), q.dim()), make_collapse_set(q, noise, co), opts.spacing);
        std::vector<Operator> rho;
        for (const Qubit2& in : inputs) {
            rho.push_back(joint_input(q, in));
        }
        for (int j = 0; j < opts.points; ++j) {
            std::vector<Qubit2> out;
            for (const Operator& r : rho) {
                out.push_back(trace_out_oscillator(q, r));
            }
            curve.time.push_back(j * opts.spacing);
            curve.fidelity.push_back(chi_from_io(inputs, out).process_fidelity());
            for (Operator& r : rho) {
                r = step.apply(r);
            }
        }
    } else {
        const HilbertConfig cfg{opts.n_max, true};
        const HilbertConfig osc = cfg.oscillator_only();
        const CodeWords code = encoding == Encoding::kFock01 ? fock_code(osc) : binomial_code(osc);
        const Operator EN = make_encoder(cfg, code);
        const double spacing = encoding == Encoding::kBinomial ? four_photon_kerr_period(dev) : opts.spacing;
        const Operator H = hamiltonian_int(cfg, dev, 0.0);
        const LindbladPropagator step(H, make_collapse_set(cfg, noise), spacing);
        std::vector<Operator> rho;
        for (const Qubit2& in : inputs) {
            rho.push_back(EN * joint_input(cfg, in) * EN.adjoint());
        }
        for (int j = 0; j < opts.points; ++j) {
            const double t = j * spacing;
            // Deterministic |2> Kerr phase removed in analysis.
            Qubit2 undo = Qubit2::Identity();
            if (encoding == Encoding::kBinomial) {
                undo(1, 1) = std::exp(kI * kerr_energy(dev, 2) * t);
            }
            const Operator D = EN.adjoint() * embed_oscillator(cfg, logical_operator(code, undo));
            std::vector<Qubit2> out;
            for (const Operator& r : rho) {
                out.push_back(trace_out_oscillator(cfg, D * r * D.adjoint()));
            }
            curve.time.push_back(t);
            curve.fidelity.push_back(chi_from_io(inputs, out).process_fidelity());
            for (Operator& r : rho) {
                r = step.apply(r);
            }
        }
    }
    curve.fit = fit_lifetime(curve.time, curve.fidelity);
    curve.tau = curve.fit.params(1);
    return curve;
}

RamseyResult ramsey_logical(bool protect, const DeviceParams& dev, const NoiseParams& noise, const ProtocolConfig& cfg,
                            const FidelityModel& fm, const RamseyOptions& opts) {
    if (opts.points < 4 || opts.unprotected_points < 4) {
        throw ConfigError("ramsey_logical: at least 4 points are needed");
    }
    ProtocolConfig pc = cfg;
    pc.n_max = opts.n_max;
    pc.mode = EngineMode::kDensityMatrix;
    pc.n_rounds = 1;
    const QecEngine::Impl im(pc, dev, noise, fm);
    const Operator half_pi = embed_oscillator(im.cfg, logical_operator(im.gates.code, rotation2(kPi / 2.0, kPi / 2.0)));
    const Qubit2 ground = (Qubit2() << 1, 0, 0, 0).finished();
    Operator start = im.encode(ground);
    start = half_pi * start * half_pi.adjoint();

    RamseyResult res;
    // Phase-cycled readout: leaked population ignores the final logical pulse, so the
    // difference of the two axes removes its decoder-dependent offset.
    auto readout = [&](const Operator& rho, double phase) {
        res.contrast.push_back(2.0 * std::abs(im.decode(rho)(0, 1)));
        double p[2];
        for (int k = 0; k < 2; ++k) {
            const Operator R =
                embed_oscillator(im.cfg, logical_operator(im.gates.code, rotation2(kPi / 2.0, phase + k * kPi)));
            p[k] = im.decode(R * rho * R.adjoint())(0, 0).real();
        }
        return 0.5 * (1.0 + p[0] - p[1]);
    };
    if (protect) {
        const double interval = im.round_time(pc.time_axis);
        const int total = (opts.points - 1) * opts.rounds_per_point;
        im.evolve_rounds(start, total, [&](int n, const Operator& rho) {
            if (n % opts.rounds_per_point != 0) {
                return;
            }
            const double t = n * interval;
            res.time.push_back(t);
            res.population.push_back(readout(rho, kPi / 2.0 + kTwoPi * opts.detuning_hz * t));
        });
    } else {
        // Free evolution in the matched frame; the fringe comes from the |2> Kerr energy.
        const double spacing = opts.unprotected_spacing > 0.0
                                   ? opts.unprotected_spacing
                                   : opts.kerr_periods_per_point * four_photon_kerr_period(im.dev);
        const LindbladPropagator idle(im.H, im.c, spacing);
        Operator rho = start;
        for (int j = 0; j < opts.unprotected_points; ++j) {
            res.time.push_back(j * spacing);
            res.population.push_back(readout(rho, kPi / 2.0));
            rho = idle.apply(rho);
        }
    }
    res.fit = fit_exponential(res.time, res.population, FitForm::kDampedCosine);
    res.coherence_time = res.fit.params(2);
    res.fringe_frequency = res.fit.params(3) / kTwoPi;
    return res;
}

namespace {

struct LogicalBench {
    HilbertConfig cfg;
    CodeWords code;
    Operator EN;
    Operator DE;
    Paulis code_target;
    Paulis decode_target;
    double F_encode = 1.0;
    double F_decode = 1.0;

    LogicalBench(int n_max, const FidelityModel& fm) : cfg{n_max, true} {
        code = binomial_code(cfg.oscillator_only());
        EN = make_encoder(cfg, code);
        DE = EN.adjoint();
        code_target = paulis_on(embed_ket(cfg, code.zero_L, 0), embed_ket(cfg, code.one_L, 0));
        decode_target = paulis_on(fock_ket(cfg, 0, 0), fock_ket(cfg, 0, 1));
        F_encode = fm.F_encode;
        F_decode = fm.F_decode;
    }

    Operator encode(const Qubit2& q) const {
        return depolarize(EN * joint_input(cfg, q) * EN.adjoint(), code_target, F_encode);
    }
    Qubit2 decode(const Operator& rho) const {
        return trace_out_oscillator(cfg, depolarize(DE * rho * DE.adjoint(), decode_target, F_decode));
    }
    Operator gate(const Qubit2& u) const { return embed_oscillator(cfg, logical_operator(code, u)); }
    Operator apply(const Operator& rho, const Operator& U, double F) const {
        return depolarize(U * rho * U.adjoint(), code_target, F);
    }
};

}  // namespace

RbResult randomized_benchmarking(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                                 const RbOptions& opts, int n_max) {
    (void)dev;
    (void)noise;
    if (opts.lengths.size() < 4 || opts.sequences < 1) {
        throw ConfigError("randomized_benchmarking: needs >= 4 lengths and >= 1 sequence");
    }
    const auto& group = clifford_group();
    if (opts.interleaved >= static_cast<int>(group.size())) {
        throw ConfigError("randomized_benchmarking: interleaved index out of range");
    }
    const LogicalBench bench(n_max, fm);
    std::vector<Operator> gates;
    for (const Qubit2& c : group) {
        gates.push_back(bench.gate(c));
    }
    const double F = rb_to_normalized(opts.gate_fidelity_rb);
    const Qubit2 ground = (Qubit2() << 1, 0, 0, 0).finished();
    const Operator start = bench.encode(ground);

    RbResult res;
    res.lengths = opts.lengths;
    std::uniform_int_distribution<int> pick(0, static_cast<int>(group.size()) - 1);
    for (std::size_t li = 0; li < opts.lengths.size(); ++li) {
        const int m = opts.lengths[li];
        double survival = 0.0;
        for (int s = 0; s < opts.sequences; ++s) {
            Rng rng(trajectory_seed(opts.seed, li * 1000003ULL + s));
            Operator rho = start;
            Qubit2 net = Qubit2::Identity();
            for (int j = 0; j < m; ++j) {
                const int g = pick(rng);
                rho = bench.apply(rho, gates[g], F);
                net = group[g] * net;
                if (opts.interleaved >= 0) {
                    rho = bench.apply(rho, gates[opts.interleaved], F);
                    net = group[opts.interleaved] * net;
                }
            }
            const int inv = clifford_index(net.adjoint());
            rho = bench.apply(rho, gates[inv], F);
            survival += bench.decode(rho)(0, 0).real();
        }
        res.survival.push_back(survival / opts.sequences);
    }
    std::vector<double> m(res.lengths.begin(), res.lengths.end());
    res.fit = fit_exponential(m, res.survival, FitForm::kPowerDecay);
    res.p = res.fit.params(1);
    res.r_gate = (1.0 - res.p) / 2.0;
    return res;
}

TGateResult t_gate_repetition(const std::vector<int>& repeats, const DeviceParams& dev, const NoiseParams& noise,
                              const FidelityModel& fm, int n_max) {
    (void)dev;
    (void)noise;
    if (repeats.size() < 4) {
        throw ConfigError("t_gate_repetition: needs >= 4 repeat counts");
    }
    const LogicalBench bench(n_max, fm);
    Qubit2 t;
    t << 1.0, 0.0, 0.0, std::exp(kI * kPi / 4.0);
    const Operator T = bench.gate(t);
    const double F = rb_to_normalized(fm.F_T_rb);
    const std::vector<Qubit2> inputs = tomography_inputs();

    TGateResult res;
    res.repeats = repeats;
    for (int R : repeats) {
        Qubit2 ideal = Qubit2::Identity();
        for (int j = 0; j < R; ++j) {
            ideal = t * ideal;
        }
        std::vector<Qubit2> outputs;
        for (const Qubit2& in : inputs) {
            Operator rho = bench.encode(in);
            for (int j = 0; j < R; ++j) {
                rho = bench.apply(rho, T, F);
            }
            outputs.push_back(ideal.adjoint() * bench.decode(rho) * ideal);
        }
        res.fidelity.push_back(chi_from_io(inputs, outputs).process_fidelity());
    }
    std::vector<double> m(repeats.begin(), repeats.end());
    res.fit = fit_exponential(m, res.fidelity, FitForm::kPowerDecay);
    res.per_gate_decay = res.fit.params(1);
    res.gate_fidelity_rb = (1.0 + res.per_gate_decay) / 2.0;
    res.intercept = res.fit.params(0) + res.fit.params(2);
    return res;
}

}  // namespace bqec
