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

// Acceptance harness: one PASS/FAIL line per criterion, indented detail lines below it.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "bqec/analytics.hpp"
#include "bqec/device.hpp"
#include "bqec/dynamics.hpp"
#include "bqec/fidelity_model.hpp"
#include "bqec/fock.hpp"
#include "bqec/grape.hpp"
#include "bqec/protocol.hpp"
#include "bqec/syndrome.hpp"
#include "bqec/tomography.hpp"

using namespace bqec;

namespace {

int failures = 0;

class Criterion {
  public:
    Criterion(int id, std::string title) : id_(id), title_(std::move(title)), start_(std::chrono::steady_clock::now()) {}

    /// Records one sub-check; the criterion passes only if every sub-check does.
    bool check(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4))) {
        char buf[512];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, args);
        va_end(args);
        lines_.push_back(std::string(ok ? "    ok    " : "    MISS  ") + buf);
        ok_ = ok_ && ok;
        return ok;
    }

    void note(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        char buf[512];
        va_list args;
        va_start(args, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, args);
        va_end(args);
        lines_.push_back(std::string("    note  ") + buf);
    }

    ~Criterion() {
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        std::printf("%s [%d] %s (%.1f s)\n", ok_ ? "PASS" : "FAIL", id_, title_.c_str(), s);
        for (const auto& l : lines_) {
            std::printf("%s\n", l.c_str());
        }
        std::fflush(stdout);
        failures += ok_ ? 0 : 1;
    }

  private:
    int id_;
    std::string title_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> lines_;
    bool ok_ = true;
};

bool within(double x, double target, double tol) { return std::abs(x - target) <= tol; }

double us(double seconds) { return seconds / kMicro; }

// First crossing of the curve above `level`, linearly interpolated; NaN if none.
double crossing(const std::vector<double>& x, const std::vector<double>& y, double level) {
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (y[i - 1] < level && y[i] >= level) {
            return x[i - 1] + (level - y[i - 1]) * (x[i] - x[i - 1]) / (y[i] - y[i - 1]);
        }
    }
    return std::nan("");
}

double gradient_error(const ControlProblem& P, const PulseSet& p, double rel_step) {
    const FidelityGradient fg = fidelity_and_gradient(P, p, GradientMethod::kExact);
    double num = 0.0, den = 0.0;
    for (int j = 0; j < kPulseChannels; ++j) {
        for (int k = 0; k < p.samples(); ++k) {
            const double h = rel_step * p.bound[j];
            PulseSet a = p, b = p;
            a.channel[j][k] += h;
            b.channel[j][k] -= h;
            const double fd = (gate_fidelity(P, a) - gate_fidelity(P, b)) / (2.0 * h);
            num += std::pow((fd - fg.gradient[j][k]) * p.bound[j], 2);
            den += std::pow(fd * p.bound[j], 2);
        }
    }
    return std::sqrt(num / den);
}

}  // namespace

int main() {
    const DeviceParams dev;
    const NoiseParams& noise = dev.noise;
    const FidelityModel fm = FidelityModel::from_device(dev, noise);
    const ProtocolConfig base;

    {
        Criterion c(1, "parity detection fidelities");
        c.check(within(fm.F0, 0.983, 0.001), "F0 = %.5f, target 0.983 +- 0.001", fm.F0);
        c.check(within(fm.F1, 0.960, 0.001), "F1 = %.5f, target 0.960 +- 0.001", fm.F1);
    }

    {
        Criterion c(2, "recovery gate fidelity at T1 = 30 us, T_phi = 120 us");
        // 0.969 to 0.970 read as values that round to either, [0.9685, 0.9705).
        c.check(fm.F_U3 >= 0.9685 && fm.F_U3 < 0.9705, "F_U3 = %.6f, target 0.969 to 0.970", fm.F_U3);
        c.note("F_U2 = F_U4 = %.6f", fm.F_U2);
    }

    {
        Criterion c(3, "error budget of the two-step protocol");
        const ErrorBudget b = error_budget(dev, noise, fm, base);
        const std::map<std::string, std::vector<double>> expected = {
            {"intrinsic", {0.070, 0.086, 0.110, 0.166}},
            {"detection", {0.034, 0.056, 0.056, 0.077}},
            {"recovery", {0.031, 0.032, 0.062, 0.062}},
            {"ancilla thermal", {0.007, 0.007, 0.007, 0.007}},
            {"total", {0.136, 0.170, 0.218, 0.283}},
        };
        std::vector<BudgetRow> rows = b.rows;
        rows.push_back(b.total);
        for (const BudgetRow& r : rows) {
            const auto& want = expected.at(r.source);
            for (std::size_t i = 0; i < b.branches.size(); ++i) {
                const std::string& br = b.branches[i];
                c.check(within(r.loss.at(br), want[i], 0.015), "%-15s %s: %.4f, target %.3f +- 0.015", r.source.c_str(),
                        br.c_str(), r.loss.at(br), want[i]);
            }
        }
        c.check(within(b.total.weighted, 0.162, 0.015), "weighted total loss %.4f, target 0.162 +- 0.015",
                b.total.weighted);
        const bool waits_ok = b.lifetime_waits >= 190e-6 && b.lifetime_waits <= 210e-6;
        const bool full_ok = b.lifetime_full >= 190e-6 && b.lifetime_full <= 210e-6;
        c.check(waits_ok || full_ok, "tau %.1f us (waits-only), %.1f us (full duration), target [190, 210] on either",
                us(b.lifetime_waits), us(b.lifetime_full));
        c.note("branch probabilities 00 %.4f, 01 %.4f, 10 %.4f, 11 %.4f", b.probability.at("00"),
               b.probability.at("01"), b.probability.at("10"), b.probability.at("11"));
        c.note("product closure defect %.4f, sum closure defect %.4f", b.product_defect, b.sum_defect);
    }

    {
        Criterion c(4, "second-detection branch statistics, 2e4 trajectories");
        ProtocolConfig pc = base;
        pc.mode = EngineMode::kTrajectory;
        pc.trajectories = 5000;  // per tomography input, four inputs
        pc.seed = 1;
        const QecResult r = run_qec(pc, dev, noise, fm);
        long even = 0, total = 0;
        for (const auto& [label, n] : r.outcome_counts) {
            total += n;
            even += label.size() == 2 && label[1] == '0' ? n : 0;
        }
        const double p_even = static_cast<double>(even) / static_cast<double>(total);
        c.check(total == 20000, "trajectories %ld", total);
        c.check(within(p_even, 0.793, 0.015), "P(second even) = %.4f, target 0.793 +- 0.015", p_even);
        c.check(within(1.0 - p_even, 0.207, 0.015), "P(second odd) = %.4f, target 0.207 +- 0.015", 1.0 - p_even);
    }

    double fock_tau = 0.0;
    {
        Criterion c(5, "lifetime hierarchy");
        ProtocolConfig pc = base;
        pc.n_rounds = 8;
        const QecResult r = run_qec(pc, dev, noise, fm);
        const double tau_waits = fit_lifetime(r.time_waits, r.fidelity).params(1);
        const double tau_full = fit_lifetime(r.time_full, r.fidelity).params(1);
        const double bin = run_uncorrected(Encoding::kBinomial, dev, noise).tau;
        const double tmon = run_uncorrected(Encoding::kTransmon, dev, noise).tau;
        fock_tau = run_uncorrected(Encoding::kFock01, dev, noise).tau;
        c.note("corrected %.1f us (waits-only), %.1f us (full duration); binomial %.1f, transmon %.1f, Fock %.1f us",
               us(tau_waits), us(tau_full), us(bin), us(tmon), us(fock_tau));
        // Evaluated on the waits-only axis; the full-duration values are reported alongside.
        c.check(within(tau_waits / bin, 2.8, 0.3), "corrected / uncorrected binomial = %.3f, target 2.8 +- 0.3 (full: %.3f)",
                tau_waits / bin, tau_full / bin);
        c.check(within(tau_waits / tmon, 5.3, 0.6), "corrected / transmon = %.3f, target 5.3 +- 0.6 (full: %.3f)",
                tau_waits / tmon, tau_full / tmon);
        const double below = 1.0 - tau_waits / fock_tau;
        c.check(below >= 0.08 && below <= 0.15, "corrected below Fock baseline by %.1f%%, target 8..15%% (full: %.1f%%)",
                100.0 * below, 100.0 * (1.0 - tau_full / fock_tau));
    }

    {
        Criterion c(6, "QND parity calibration");
        const std::vector<double> reps{1e-6, 2e-6, 5e-6, 10e-6, 30e-6};
        const QndCalibration q = qnd_calibrate(cplx(std::sqrt(2.0), 0.0), reps, dev.meas, noise, 600e-6);
        c.check(within(q.p_d, 0.0008, 0.0003), "p_d = %.5f, target 0.0008 +- 0.0003", q.p_d);
        c.check(within(q.tau_s / 143e-6, 1.0, 0.05), "tau_s = %.2f us, target 143 +- 5%%", us(q.tau_s));
        QndOptions shots;
        shots.shots = 20000;
        shots.seed = 1;
        const QndCalibration noisy = qnd_calibrate(cplx(std::sqrt(2.0), 0.0), reps, dev.meas, noise, 600e-6, shots);
        c.check(within(noisy.p_d, 0.0008, 0.0003), "with 2e4 shots per point: p_d = %.5f", noisy.p_d);
        c.check(within(noisy.tau_s / 143e-6, 1.0, 0.05), "with 2e4 shots per point: tau_s = %.2f us", us(noisy.tau_s));
    }

    {
        Criterion c(7, "Kerr calibration closed loop");
        DeviceParams injected = dev;
        injected.K_s = kTwoPi * 4.23e3;
        injected.K_s_prime = kTwoPi * 454.0;
        const KerrCalibration k = kerr_calibration(injected, injected.noise);
        c.check(within(k.K_s / injected.K_s, 1.0, 0.02), "K_s = %.2f Hz, injected 4230, tolerance 2%%", k.K_s / kTwoPi);
        c.check(within(k.K_s_prime / injected.K_s_prime, 1.0, 0.05), "K_s' = %.2f Hz, injected 454, tolerance 5%%",
                k.K_s_prime / kTwoPi);
    }

    {
        Criterion c(8, "logical Ramsey");
        const RamseyResult free = ramsey_logical(false, dev, noise, base, fm);
        // The unprotected delay is physical time; the protected one is reported on both round-time axes
        // and the criterion holds if every check passes on one of them.
        bool any_axis = false;
        for (TimeAxis axis : {TimeAxis::kWaitsOnly, TimeAxis::kFullDuration}) {
            ProtocolConfig pc = base;
            pc.time_axis = axis;
            const RamseyResult prot = ramsey_logical(true, dev, noise, pc, fm);
            const double ratio = prot.coherence_time / free.coherence_time;
            const bool ok_ratio = within(ratio, 2.1, 0.3);
            const bool ok_free = free.coherence_time >= 90e-6 && free.coherence_time <= 115e-6;
            const bool ok_prot = prot.coherence_time >= 185e-6 && prot.coherence_time <= 240e-6;
            any_axis = any_axis || (ok_ratio && ok_free && ok_prot);
            c.note("%s: ratio %.3f [%s], unprotected %.1f us in [90, 115] [%s], protected %.1f us in [185, 240] [%s], "
                   "fringe %.1f Hz",
                   axis == TimeAxis::kWaitsOnly ? "waits-only" : "full duration", ratio, ok_ratio ? "ok" : "miss",
                   us(free.coherence_time), ok_free ? "ok" : "miss", us(prot.coherence_time), ok_prot ? "ok" : "miss",
                   prot.fringe_frequency);
        }
        c.check(any_axis, "ratio 2.1 +- 0.3 and both absolute windows on one axis");
        c.note("unprotected fringe %.1f Hz", free.fringe_frequency);
    }

    {
        Criterion c(9, "randomized benchmarking and T gate");
        const RbResult rb = randomized_benchmarking(dev, noise, fm, RbOptions{});
        c.check(within(rb.r_gate, 0.031, 0.006), "r_gate = %.4f, target 0.031 +- 0.006", rb.r_gate);
        const TGateResult t = t_gate_repetition({0, 5, 10, 20, 30, 40, 50, 60}, dev, noise, fm);
        c.check(within(t.per_gate_decay, 0.974, 0.005), "T-gate decay per repetition %.4f, target 0.974 +- 0.005",
                t.per_gate_decay);
        c.check(within(t.intercept, 0.931, 0.01), "T-gate n = 0 intercept %.4f, target 0.931 +- 0.01", t.intercept);
    }

    {
        Criterion c(10, "lifetime sweeps and break-even");
        SweepOptions full = SweepOptions::defaults();
        full.axis = TimeAxis::kFullDuration;
        SweepOptions waits = SweepOptions::defaults();
        const std::vector<int> steps{1, 2, 3, 4};
        const auto n_full = sweep_steps(dev, noise, fm, steps, full);
        const auto n_waits = sweep_steps(dev, noise, fm, steps, waits);
        bool monotone = true;
        for (std::size_t i = 1; i < n_full.size(); ++i) {
            monotone = monotone && n_full[i].best_tau > n_full[i - 1].best_tau;
        }
        // The Fock baseline is a physical-time lifetime, so the full-duration axis is the like-for-like comparison.
        c.check(monotone, "full duration: tau(N=1..4) = %.1f, %.1f, %.1f, %.1f us increasing", us(n_full[0].best_tau),
                us(n_full[1].best_tau), us(n_full[2].best_tau), us(n_full[3].best_tau));
        c.note("waits-only: tau(N=1..4) = %.1f, %.1f, %.1f, %.1f us", us(n_waits[0].best_tau), us(n_waits[1].best_tau),
               us(n_waits[2].best_tau), us(n_waits[3].best_tau));
        c.check(n_full[3].best_tau >= fock_tau, "N = 4: %.1f us against Fock baseline %.1f us", us(n_full[3].best_tau),
                us(fock_tau));
        std::vector<std::pair<double, double>> pairs;
        std::vector<double> t1;
        for (double v = 30.0; v <= 90.0 + 1e-9; v += 5.0) {
            pairs.emplace_back(v * kMicro, 120e-6);
            t1.push_back(v);
        }
        std::vector<double> tau_full, tau_waits;
        for (const auto& cv : sweep_coherence(dev, noise, fm, pairs, full)) {
            tau_full.push_back(cv.best_tau);
        }
        for (const auto& cv : sweep_coherence(dev, noise, fm, pairs, waits)) {
            tau_waits.push_back(cv.best_tau);
        }
        const double be_full = crossing(t1, tau_full, fock_tau);
        const double be_waits = crossing(t1, tau_waits, fock_tau);
        c.check(std::isfinite(be_full) && within(be_full, 60.0, 12.0),
                "full duration: break-even at T1 = %.1f us (T_phi = 120 us), target 60 +- 20%%", be_full);
        c.note("waits-only: break-even at T1 = %.1f us", be_waits);
    }

    {
        Criterion c(11, "property suites");
        // Trajectory unravelling against the master equation, 1e4 samples.
        {
            const HilbertConfig cfg{8, true};
            const Operator H = hamiltonian_int(cfg, dev, four_photon_frame_rate(dev));
            const CollapseSet cs = make_collapse_set(cfg, noise);
            Ket psi = Ket::Zero(cfg.dim());
            psi(cfg.index(0, 0)) = 0.5;
            psi(cfg.index(4, 0)) = 0.5;
            psi(cfg.index(2, 0)) = cplx(0.0, -std::sqrt(0.5));
            const JumpEvolver ev(H, cs);
            Operator avg = Operator::Zero(cfg.dim(), cfg.dim());
            const int n = 10000;
            for (int k = 0; k < n; ++k) {
                Rng rng(trajectory_seed(11, k));
                Ket p = psi;
                ev.evolve(p, 17.895e-6, rng);
                avg += p * p.adjoint();
            }
            avg /= n;
            const Operator exact = LindbladPropagator(H, cs, 17.895e-6).apply(psi * psi.adjoint());
            const double dev_max = (avg - exact).cwiseAbs().maxCoeff();
            c.check(dev_max < 0.02, "trajectory vs master equation, density entries: max deviation %.4f", dev_max);

            ProtocolConfig pc = base;
            pc.n_rounds = 2;
            pc.mode = EngineMode::kTrajectory;
            pc.trajectories = 2500;
            const QecResult tr = run_qec(pc, dev, noise, fm);
            pc.mode = EngineMode::kDensityMatrix;
            const QecResult dm = run_qec(pc, dev, noise, fm);
            double worst = 0.0;
            for (std::size_t i = 0; i < dm.fidelity.size(); ++i) {
                worst = std::max(worst, std::abs(tr.fidelity[i] - dm.fidelity[i]));
            }
            c.check(worst < 0.02, "trajectory vs density-matrix protocol, per-round F_chi: max deviation %.4f", worst);

            // Byte-identical reruns under a fixed seed, independent of the thread count.
            pc.mode = EngineMode::kTrajectory;
            pc.trajectories = 500;
            pc.threads = 1;
            const QecResult a = run_qec(pc, dev, noise, fm);
            pc.threads = 0;
            const QecResult b = run_qec(pc, dev, noise, fm);
            c.check(a.fidelity == b.fidelity && a.outcome_counts == b.outcome_counts,
                    "fixed-seed trajectory reruns are bit-identical across thread counts");
        }
        // Trace and positivity.
        {
            const HilbertConfig cfg{6, true};
            const Operator H = hamiltonian_int(cfg, dev, four_photon_frame_rate(dev));
            Ket psi = Ket::Zero(cfg.dim());
            psi(cfg.index(0, 0)) = 0.5;
            psi(cfg.index(4, 0)) = 0.5;
            psi(cfg.index(2, 1)) = std::sqrt(0.5);
            const Operator rho = LindbladPropagator(H, make_collapse_set(cfg, noise), 20e-6).apply(psi * psi.adjoint());
            Eigen::SelfAdjointEigenSolver<Operator> es(0.5 * (rho + rho.adjoint()));
            c.check(std::abs(rho.trace() - 1.0) < 1e-10 && es.eigenvalues().minCoeff() > -1e-10,
                    "Lindblad step: trace error %.1e, smallest eigenvalue %.1e", std::abs(rho.trace() - 1.0),
                    es.eigenvalues().minCoeff());
        }
        // Operator algebra.
        {
            const HilbertConfig cfg{10, false};
            const Operator a = destroy(cfg);
            const Operator comm = a * a.adjoint() - a.adjoint() * a;
            const double e1 = (comm.topLeftCorner(cfg.n_max, cfg.n_max) - Operator::Identity(cfg.n_max, cfg.n_max))
                                  .cwiseAbs()
                                  .maxCoeff();
            const Operator P = parity_op(cfg);
            const double e2 = (P * P - identity(cfg)).cwiseAbs().maxCoeff();
            const double e3 = (expm(-number(cfg), kPi) - P).cwiseAbs().maxCoeff();
            c.check(e1 < 1e-12 && e2 < 1e-12 && e3 < 1e-10,
                    "[a, a+] = 1 below the edge (%.1e), P^2 = 1 (%.1e), P = exp(i pi n) (%.1e)", e1, e2, e3);
        }
        // GRAPE gradient and the noiseless encode pulse.
        {
            const ControlProblem small = encode_problem(dev, 5);
            double worst = 0.0;
            for (std::uint64_t seed : {1, 2, 3}) {
                worst = std::max(worst, gradient_error(small, PulseSet::random(seed, 0.5, 20e-9, 2e-9), 1e-7));
            }
            c.check(worst < 1e-4, "GRAPE gradient vs central differences: relative error %.2e", worst);
            GrapeOptions opts;
            opts.target_fidelity = 0.99;
            const GrapeResult g = optimize(encode_problem(dev, 6), PulseSet::random(1, 0.1), opts);
            c.check(g.trace.back() >= 0.99, "GRAPE encode isometry: F = %.5f after %d iterations", g.trace.back(),
                    g.iterations);
        }
        // Process-matrix anchors.
        {
            const double id = process_tomography([](const Qubit2& r) { return r; }).process_fidelity();
            const double dep =
                process_tomography([](const Qubit2& r) -> Qubit2 { return 0.5 * r.trace() * Qubit2::Identity(); })
                    .process_fidelity();
            c.check(within(id, 1.0, 1e-12) && within(dep, 0.25, 1e-12), "chi anchors: identity %.12f, depolarizing %.12f",
                    id, dep);
        }
        // The two-step model collapses to the one-step model when the second detection is trivial.
        {
            FidelityModel f = fm;
            f.F0 = 1.0;
            f.F_pi = 1.0;
            // A trivial second step also applies no final even recovery.
            f.F_U1 = f.F_U3 = 1.0;
            const IntrinsicPoint p1 = intrinsic_point(dev, noise, 1, 36e-6);
            IntrinsicPoint p2;
            p2.steps = 2;
            p2.t_w = 18e-6;
            p2.T_w_waits = p1.T_w_waits;
            p2.T_w_full = p1.T_w_full;
            p2.probability = {{"00", p1.probability.at("0")}, {"01", 0.0}, {"10", p1.probability.at("1")}, {"11", 0.0}};
            p2.fidelity = {{"00", p1.F("0")}, {"01", 0.5}, {"10", p1.F("1")}, {"11", 0.5}};
            const double one = protocol1_model(f, p1, TimeAxis::kWaitsOnly);
            const double two = protocol2_model(f, p2, TimeAxis::kWaitsOnly);
            c.check(std::abs(one - two) < 1e-12, "two-step model under branch collapse: %.12f vs one-step %.12f", two, one);
        }
    }

    std::printf("%d criteria failed\n", failures);
    return failures;
}
