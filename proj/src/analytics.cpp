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

#include "bqec/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <thread>

#include "bqec/dynamics.hpp"
#include "bqec/errors.hpp"

namespace bqec {

namespace {

using CacheKey = std::vector<double>;

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

std::map<CacheKey, IntrinsicPoint>& cache() {
    static std::map<CacheKey, IntrinsicPoint> c;
    return c;
}

// Everything the intrinsic run reads: oscillator Hamiltonian, step timing and cavity bath.
CacheKey intrinsic_key(const DeviceParams& dev, const NoiseParams& noise, int steps, double t_w, int n_max) {
    return {dev.chi_qs,      dev.K_s,         dev.K_s_prime,     dev.meas.T_BM, dev.meas.T_AM,
            dev.meas.latency, noise.kappa_s,  noise.n_th_s,      static_cast<double>(steps), t_w,
            static_cast<double>(n_max)};
}

int resolve_threads(int requested) {
    return requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

struct BudgetRun {
    std::map<std::string, double> fidelity;
    std::map<std::string, double> probability;
};

BudgetRun budget_run(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm, ProtocolConfig pc,
                     const ErrorSources& sources, bool by_truth) {
    pc.sources = sources;
    pc.n_rounds = 1;
    pc.mode = EngineMode::kDensityMatrix;
    const QecResult r = run_qec(pc, dev, noise, fm);
    BudgetRun out;
    for (const auto& [label, b] : by_truth ? r.true_branches : r.reported_branches) {
        out.probability[label] = b.probability;
        if (b.probability > 1e-14) {
            out.fidelity[label] = b.normalized_fidelity();
        }
    }
    return out;
}

double branch_fidelity(const BudgetRun& run, const std::string& label) {
    const auto it = run.fidelity.find(label);
    return it == run.fidelity.end() ? 1.0 : it->second;
}

std::vector<std::string> all_labels(int steps) {
    std::vector<std::string> out;
    for (int m = 0; m < (1 << steps); ++m) {
        std::string s(steps, '0');
        for (int k = 0; k < steps; ++k) {
            if (m & (1 << (steps - 1 - k))) {
                s[k] = '1';
            }
        }
        out.push_back(s);
    }
    return out;
}

void weigh(BudgetRow& row, const std::map<std::string, double>& probability) {
    row.weighted = 0.0;
    for (const auto& [label, loss] : row.loss) {
        row.weighted += probability.at(label) * loss;
    }
}

LifetimeCurve lifetime_curve(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                             const SweepOptions& opts, int steps) {
    if (opts.interval_grid.empty()) {
        throw ConfigError("sweep: empty round-interval grid");
    }
    LifetimeCurve c;
    c.steps = steps;
    c.interval = opts.interval_grid;
    for (double T : c.interval) {
        c.t_w.push_back(T / steps);
    }
    const IntrinsicErrorTable table = compute_intrinsic_table(dev, noise, steps, c.t_w, opts.n_max, opts.threads);
    std::size_t best = 0;
    for (std::size_t i = 0; i < table.points.size(); ++i) {
        const IntrinsicPoint& p = table.points[i];
        const double F = nstep_model(fm, p, opts.axis);
        c.round_fidelity.push_back(F);
        c.tau.push_back(F > 0.0 && F < 1.0 ? lifetime_from_round_fidelity(F, round_interval(p, opts.axis)) : 0.0);
        if (c.tau[i] > c.tau[best]) {
            best = i;
        }
    }
    c.best_t_w = c.t_w[best];
    c.best_tau = c.tau[best];
    // Parabolic vertex through the grid maximum and its neighbours.
    if (best > 0 && best + 1 < c.tau.size()) {
        const double x0 = c.t_w[best - 1], x1 = c.t_w[best], x2 = c.t_w[best + 1];
        const double y0 = c.tau[best - 1], y1 = c.tau[best], y2 = c.tau[best + 1];
        const double d = (x0 - x1) * (x0 - x2) * (x1 - x2);
        const double a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / d;
        const double b = (x2 * x2 * (y0 - y1) + x1 * x1 * (y2 - y0) + x0 * x0 * (y1 - y2)) / d;
        if (a < 0.0) {
            const double xv = -b / (2.0 * a);
            if (xv > x0 && xv < x2) {
                const double cc = y1 - a * x1 * x1 - b * x1;
                c.best_t_w = xv;
                c.best_tau = a * xv * xv + b * xv + cc;
            }
        }
    }
    return c;
}

}  // namespace

IntrinsicErrorTable compute_intrinsic_table(const DeviceParams& dev, const NoiseParams& noise, int steps,
                                            const std::vector<double>& t_w_grid, int n_max, int threads) {
    if (steps < 1 || steps > 6) {
        throw ConfigError("compute_intrinsic_table: steps must be in [1, 6]");
    }
    for (std::size_t i = 0; i < t_w_grid.size(); ++i) {
        if (!(t_w_grid[i] > 0.0) || (i > 0 && !(t_w_grid[i] > t_w_grid[i - 1]))) {
            throw ConfigError("compute_intrinsic_table: grid must be positive and strictly increasing");
        }
    }
    IntrinsicErrorTable table;
    table.steps = steps;
    table.points.resize(t_w_grid.size());
    std::vector<std::size_t> missing;
    {
        std::lock_guard<std::mutex> lock(cache_mutex());
        for (std::size_t i = 0; i < t_w_grid.size(); ++i) {
            const auto it = cache().find(intrinsic_key(dev, noise, steps, t_w_grid[i], n_max));
            if (it != cache().end()) {
                table.points[i] = it->second;
            } else {
                missing.push_back(i);
            }
        }
    }
    auto compute = [&](std::size_t j) {
        const std::size_t i = missing[j];
        table.points[i] = intrinsic_point(dev, noise, steps, t_w_grid[i], n_max);
        std::lock_guard<std::mutex> lock(cache_mutex());
        cache()[intrinsic_key(dev, noise, steps, t_w_grid[i], n_max)] = table.points[i];
    };
    const int n_threads = std::min<int>(resolve_threads(threads), static_cast<int>(missing.size()));
    if (n_threads <= 1) {
        for (std::size_t j = 0; j < missing.size(); ++j) {
            compute(j);
        }
    } else {
        // Each slot is written by exactly one worker, so the table order does not depend on scheduling.
        std::vector<std::thread> pool;
        for (int t = 0; t < n_threads; ++t) {
            pool.emplace_back([&, t] {
                for (std::size_t j = t; j < missing.size(); j += n_threads) {
                    compute(j);
                }
            });
        }
        for (auto& th : pool) {
            th.join();
        }
    }
    return table;
}

std::size_t intrinsic_cache_size() {
    std::lock_guard<std::mutex> lock(cache_mutex());
    return cache().size();
}

void clear_intrinsic_cache() {
    std::lock_guard<std::mutex> lock(cache_mutex());
    cache().clear();
}

ErrorBudget error_budget(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                         const ProtocolConfig& cfg, bool by_truth) {
    cfg.validate();
    ErrorSources intrinsic = ErrorSources::intrinsic_only();
    intrinsic.cavity_loss = cfg.sources.cavity_loss;
    intrinsic.kerr = cfg.sources.kerr;

    ErrorBudget out;
    out.branches = all_labels(cfg.steps_per_round);
    const BudgetRun base = budget_run(dev, noise, fm, cfg, intrinsic, by_truth);

    struct Toggle {
        const char* name;
        bool ErrorSources::*flag;
    };
    const Toggle toggles[] = {{"detection", &ErrorSources::detection},
                              {"recovery", &ErrorSources::recovery},
                              {"ancilla thermal", &ErrorSources::ancilla}};

    ErrorSources joint = intrinsic;
    BudgetRow intr_row{"intrinsic", {}, 0.0};
    for (const auto& label : out.branches) {
        intr_row.loss[label] = 1.0 - branch_fidelity(base, label);
    }
    out.rows.push_back(intr_row);
    for (const Toggle& t : toggles) {
        BudgetRow row{t.name, {}, 0.0};
        if (cfg.sources.*(t.flag)) {
            ErrorSources s = intrinsic;
            s.*(t.flag) = true;
            joint.*(t.flag) = true;
            const BudgetRun run = budget_run(dev, noise, fm, cfg, s, by_truth);
            for (const auto& label : out.branches) {
                const double f0 = branch_fidelity(base, label);
                row.loss[label] = f0 > 0.0 ? 1.0 - branch_fidelity(run, label) / f0 : 0.0;
            }
        } else {
            for (const auto& label : out.branches) {
                row.loss[label] = 0.0;
            }
        }
        out.rows.push_back(row);
    }

    const BudgetRun total = budget_run(dev, noise, fm, cfg, joint, by_truth);
    out.total.source = "total";
    for (const auto& label : out.branches) {
        out.total.loss[label] = 1.0 - branch_fidelity(total, label);
        const auto it = total.probability.find(label);
        out.probability[label] = it == total.probability.end() ? 0.0 : it->second;
    }
    for (auto& row : out.rows) {
        weigh(row, out.probability);
    }
    weigh(out.total, out.probability);

    for (const auto& label : out.branches) {
        double keep = 1.0, sum = 0.0;
        for (const auto& row : out.rows) {
            keep *= 1.0 - row.loss.at(label);
            sum += row.loss.at(label);
        }
        out.product_defect = std::max(out.product_defect, std::abs((1.0 - out.total.loss.at(label)) - keep));
        out.sum_defect = std::max(out.sum_defect, std::abs(out.total.loss.at(label) - sum));
    }

    const double F_round = 1.0 - out.total.weighted;
    if (F_round > 0.0 && F_round < 1.0) {
        ProtocolConfig pc = cfg;
        pc.sources = joint;
        const QecEngine engine(pc, dev, noise, fm);
        out.lifetime_waits = lifetime_from_round_fidelity(F_round, cfg.steps_per_round * cfg.t_w);
        out.lifetime_full = lifetime_from_round_fidelity(F_round, cfg.steps_per_round * engine.timing().step());
    }
    return out;
}

SweepOptions SweepOptions::defaults() {
    SweepOptions o;
    for (double T = 12e-6; T <= 96e-6 + 1e-12; T += 6e-6) {
        o.interval_grid.push_back(T);
    }
    return o;
}

LifetimeCurve sweep_wait(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                         const SweepOptions& opts) {
    LifetimeCurve c = lifetime_curve(dev, noise, fm, opts, opts.steps);
    c.label = "T_w";
    return c;
}

std::vector<LifetimeCurve> sweep_recovery_fidelity(const DeviceParams& dev, const NoiseParams& noise,
                                                   const FidelityModel& fm, const std::vector<double>& F_U,
                                                   const SweepOptions& opts) {
    std::vector<LifetimeCurve> out;
    for (double f : F_U) {
        if (!(f > 0.0 && f <= 1.0)) {
            throw ConfigError("sweep_recovery_fidelity: F_U must lie in (0, 1]");
        }
        LifetimeCurve c = lifetime_curve(dev, noise, fm.with_recovery(f), opts, opts.steps);
        c.label = "F_U";
        c.parameter = f;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<LifetimeCurve> sweep_coherence(const DeviceParams& dev, const NoiseParams& noise,
                                           const FidelityModel& fm,
                                           const std::vector<std::pair<double, double>>& T1_Tphi,
                                           const SweepOptions& opts) {
    std::vector<LifetimeCurve> out;
    for (const auto& [T1, T_phi] : T1_Tphi) {
        NoiseParams n = noise;
        n.T1 = T1;
        n.T_phi = T_phi;
        n.validate();
        // Coherence-dependent entries follow the linear laws; the rest stay as calibrated.
        FidelityModel f = FidelityModel::from_device(dev, n);
        f.F_pi = fm.F_pi;
        f.F_encode = fm.F_encode;
        f.F_decode = fm.F_decode;
        f.F_clifford_rb = fm.F_clifford_rb;
        f.F_T_rb = fm.F_T_rb;
        LifetimeCurve c = lifetime_curve(dev, noise, f, opts, opts.steps);
        c.label = "T1,T_phi";
        c.parameter = T1;
        c.parameter2 = T_phi;
        out.push_back(std::move(c));
    }
    return out;
}

std::vector<LifetimeCurve> sweep_steps(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                                       const std::vector<int>& steps, const SweepOptions& opts) {
    std::vector<LifetimeCurve> out;
    for (int n : steps) {
        LifetimeCurve c = lifetime_curve(dev, noise, fm, opts, n);
        c.label = "steps";
        c.parameter = n;
        out.push_back(std::move(c));
    }
    return out;
}

double predict_cross_kerr(double K_a, double K_b) {
    if (K_a < 0.0 || K_b < 0.0) {
        throw DomainError("predict_cross_kerr: Kerr magnitudes must be non-negative");
    }
    return -2.0 * std::sqrt(K_a * K_b);
}

namespace {

// Parity after D(alpha e^{i phi}) on each sample of a free Kerr evolution. The diagonal part
// of rho is rotation invariant, so shifting phi by pi / upper flips only the |0><upper|
// coherence term; the half-difference of the two settings removes the drifting population
// background left by photon loss.
KerrScan kerr_scan(const DeviceParams& dev, const NoiseParams& noise, const KerrScanOptions& opts, int upper,
                   double step, double alpha, const std::function<double(double)>& phase) {
    const HilbertConfig cfg{opts.n_max, false};
    Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    for (int n = 0; n <= opts.n_max; ++n) {
        H(n, n) = kerr_energy(dev, n);
    }
    const LindbladPropagator prop(H, make_collapse_set(cfg, noise), step);
    const Operator P = parity_op(cfg);
    const Ket psi = (fock_ket(cfg, 0) + fock_ket(cfg, upper)) / std::sqrt(2.0);
    Operator rho = psi * psi.adjoint();
    const double P_e = opts.readout_errors ? dev.meas.P_e : 1.0;
    const double P_o = opts.readout_errors ? dev.meas.P_o : 1.0;
    auto reported_parity = [&](double phi) {
        const Operator D = displacement(cfg, std::polar(alpha, phi));
        const double even = 0.5 * (1.0 + (P * D * rho * D.adjoint()).trace().real());
        return 2.0 * (P_e * even + (1.0 - P_o) * (1.0 - even)) - 1.0;
    };

    KerrScan scan;
    for (int i = 0; i < opts.points; ++i) {
        const double t = i * step;
        const double phi = phase(t);
        scan.t.push_back(t);
        scan.parity.push_back(0.5 * (reported_parity(phi) - reported_parity(phi + kPi / upper)));
        rho = prop.apply(rho);
    }
    scan.fit = fit_exponential(scan.t, scan.parity, FitForm::kDampedCosine);
    scan.frequency_hz = std::abs(scan.fit.params(3)) / kTwoPi;
    return scan;
}

}  // namespace

KerrCalibration kerr_calibration(const DeviceParams& dev, const NoiseParams& noise, const KerrScanOptions& opts) {
    if (opts.n_max < 8 || opts.points < 8 || !(opts.step_two > 0.0) || !(opts.step_four > 0.0)) {
        throw ConfigError("kerr_calibration: need n_max >= 8, points >= 8 and positive steps");
    }
    KerrCalibration out;
    const double detuning = opts.detuning_hz;
    out.two = kerr_scan(dev, noise, opts, 2, opts.step_two, opts.alpha_two,
                        [detuning](double t) { return -kPi * detuning * t; });
    const double phase_four = opts.phase_four;
    out.four = kerr_scan(dev, noise, opts, 4, opts.step_four, opts.alpha_four,
                         [phase_four](double) { return phase_four; });
    // Fringes sit at K + 2 pi detuning and at -E_4 = 6 K + 4 K'.
    out.K_s = kTwoPi * (out.two.frequency_hz - detuning);
    out.K_s_prime = (kTwoPi * out.four.frequency_hz - 6.0 * out.K_s) / 4.0;
    return out;
}

}  // namespace bqec
