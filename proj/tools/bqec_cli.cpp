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

#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/version.hpp>

#include "CLI11.hpp"
#include "json.hpp"

#include "bqec/analytics.hpp"
#include "bqec/config.hpp"
#include "bqec/errors.hpp"
#include "bqec/grape.hpp"
#include "bqec/protocol.hpp"
#include "bqec/syndrome.hpp"

using namespace bqec;
using Json = nlohmann::ordered_json;

namespace {

constexpr const char* kVersion = BQEC_VERSION;

// Fits need at least this many points; shorter series are emitted without one.
constexpr std::size_t kMinFitPoints = 4;

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << v;
    return os.str();
}

// Collects the files of one command and writes its summary and manifest last.
class Run {
  public:
    Run(std::string command, const RunConfig& cfg, std::string dir, std::uint64_t seed)
        : command_(std::move(command)), cfg_(cfg), dir_(std::move(dir)), seed_(seed),
          start_(std::chrono::steady_clock::now()) {
        std::filesystem::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return (std::filesystem::path(dir_) / name).string(); }

    /// Rows are written in call order with 12 significant digits.
    void csv(const std::string& name, const std::vector<std::string>& header,
             const std::function<void(std::ostream&)>& body) {
        std::ofstream out(path(name));
        if (!out) {
            throw Error("cannot write " + path(name));
        }
        out << std::setprecision(12);
        for (std::size_t i = 0; i < header.size(); ++i) {
            out << (i ? "," : "") << header[i];
        }
        out << "\n";
        body(out);
        outputs_.push_back(name);
    }

    void keep(const std::string& name) { outputs_.push_back(name); }

    void finish(Json summary) {
        const std::string manifest = command_ + "_manifest.json";
        const std::string summary_name = command_ + ".json";
        Json head;
        head["command"] = command_;
        head["manifest"] = manifest;
        head["config_hash"] = hex(cfg_.hash());
        for (auto& [k, v] : summary.items()) {
            head[k] = v;
        }
        write(summary_name, head);
        outputs_.push_back(summary_name);

        const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        Json m;
        m["command"] = command_;
        m["config_hash"] = hex(cfg_.hash());
        m["seed"] = seed_;
        m["versions"] = {{"bqec", kVersion},
                         {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) +
                                       "." + std::to_string(EIGEN_MINOR_VERSION)},
                         {"boost", BOOST_LIB_VERSION}};
        m["outputs"] = outputs_;
        m["wall_time_s"] = wall;
        write(manifest, m);
        std::cout << path(summary_name) << "\n";
    }

  private:
    void write(const std::string& name, const Json& j) const {
        std::ofstream out(path(name));
        if (!out) {
            throw Error("cannot write " + path(name));
        }
        out << j.dump(2) << "\n";
    }

    std::string command_;
    const RunConfig& cfg_;
    std::string dir_;
    std::uint64_t seed_;
    std::chrono::steady_clock::time_point start_;
    std::vector<std::string> outputs_;
};

Json fit_json(const FitResult& f) {
    Json j;
    j["params"] = std::vector<double>(f.params.data(), f.params.data() + f.params.size());
    j["std_errors"] = std::vector<double>(f.std_errors.data(), f.std_errors.data() + f.std_errors.size());
    j["rss"] = f.rss;
    return j;
}

// "a, b, c" or "start:stop:step" (inclusive).
std::vector<double> parse_grid(const std::string& text) {
    std::vector<double> out;
    const auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw ConfigError("grid: cannot parse '" + s + "'");
        }
        if (used != s.size()) {
            throw ConfigError("grid: cannot parse '" + s + "'");
        }
        return v;
    };
    if (std::count(text.begin(), text.end(), ':') == 2) {
        const auto a = text.find(':');
        const auto b = text.find(':', a + 1);
        const double start = number(text.substr(0, a));
        const double stop = number(text.substr(a + 1, b - a - 1));
        const double step = number(text.substr(b + 1));
        if (!(step > 0.0) || stop < start) {
            throw ConfigError("grid: need step > 0 and stop >= start");
        }
        const long n = std::lround(std::floor((stop - start) / step + 1e-9));
        for (long i = 0; i <= n; ++i) {
            out.push_back(start + static_cast<double>(i) * step);
        }
        return out;
    }
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        tok.erase(0, tok.find_first_not_of(' '));
        tok.erase(tok.find_last_not_of(' ') + 1);
        out.push_back(number(tok));
    }
    if (out.empty()) {
        throw ConfigError("grid: empty");
    }
    return out;
}

EngineMode parse_mode(const std::string& s) {
    if (s == "scalar") {
        return EngineMode::kScalarModel;
    }
    if (s == "trajectory") {
        return EngineMode::kTrajectory;
    }
    return EngineMode::kDensityMatrix;
}

TimeAxis parse_axis(const std::string& s) { return s == "full" ? TimeAxis::kFullDuration : TimeAxis::kWaitsOnly; }

void curves_csv(Run& run, const std::vector<LifetimeCurve>& curves) {
    run.csv("sweep.csv", {"label", "parameter", "parameter2", "steps", "t_w_s", "interval_s", "round_fidelity", "tau_s"},
            [&](std::ostream& o) {
                for (const auto& c : curves) {
                    for (std::size_t i = 0; i < c.t_w.size(); ++i) {
                        o << c.label << "," << c.parameter << "," << c.parameter2 << "," << c.steps << "," << c.t_w[i]
                          << "," << c.interval[i] << "," << c.round_fidelity[i] << "," << c.tau[i] << "\n";
                    }
                }
            });
}

Json curves_json(const std::vector<LifetimeCurve>& curves) {
    Json arr = Json::array();
    for (const auto& c : curves) {
        arr.push_back({{"label", c.label},
                       {"parameter", c.parameter},
                       {"parameter2", c.parameter2},
                       {"steps", c.steps},
                       {"best_t_w_s", c.best_t_w},
                       {"best_tau_s", c.best_tau}});
    }
    return arr;
}

struct Globals {
    std::string config;
    std::string out = ".";
    int threads = -1;
};

struct LifetimeArgs {
    int protocol = -1;
    double tw_us = -1.0;
    int rounds = -1;
    std::string mode;
    std::string axis;
    std::string measurement;
    long seed = -1;
};

struct SweepArgs {
    std::string vary = "tw";
    std::string grid;
    std::string axis;
};

RunConfig prepare(const Globals& g) {
    RunConfig c = resolve_config(g.config);
    if (g.threads >= 0) {
        c.protocol.threads = g.threads;
        c.sweep.threads = g.threads;
    }
    return c;
}

void cmd_qec_lifetime(const Globals& g, const LifetimeArgs& a) {
    RunConfig c = prepare(g);
    ProtocolConfig& pc = c.protocol;
    if (a.protocol >= 0) {
        pc.steps_per_round = a.protocol;
    }
    if (a.tw_us >= 0.0) {
        pc.t_w = a.tw_us * kMicro;
    }
    if (a.rounds >= 0) {
        pc.n_rounds = a.rounds;
    }
    if (!a.mode.empty()) {
        pc.mode = parse_mode(a.mode);
    }
    if (!a.axis.empty()) {
        pc.time_axis = parse_axis(a.axis);
    }
    if (!a.measurement.empty()) {
        pc.measurement = a.measurement == "microscopic" ? MeasureMode::kMicroscopic : MeasureMode::kScalar;
    }
    if (a.seed >= 0) {
        pc.seed = static_cast<std::uint64_t>(a.seed);
    }
    pc.validate();
    Run run("qec-lifetime", c, g.out, pc.seed);
    const QecResult r = run_qec(pc, c.dev, c.noise, c.fm);
    run.csv("qec-lifetime.csv", {"round", "time_s", "time_waits_s", "time_full_s", "f_chi", "f_normalized"},
            [&](std::ostream& o) {
                for (std::size_t n = 0; n < r.fidelity.size(); ++n) {
                    o << n << "," << r.time[n] << "," << r.time_waits[n] << "," << r.time_full[n] << ","
                      << r.fidelity[n] << "," << normalize_fidelity(r.fidelity[n]) << "\n";
                }
            });
    Json s;
    s["steps"] = pc.steps_per_round;
    s["t_w_s"] = pc.t_w;
    s["rounds"] = pc.n_rounds;
    s["round_trip_f_chi"] = r.fidelity.front();
    if (r.fidelity.size() >= 2) {
        s["one_round_f_chi"] = r.fidelity[1];
    }
    if (r.fidelity.size() >= kMinFitPoints) {
        const FitResult f = fit_lifetime(r.time, r.fidelity);
        s["tau_s"] = f.params(1);
        s["fit"] = fit_json(f);
    } else {
        s["tau_s"] = nullptr;
    }
    Json branches;
    for (const auto& [label, b] : r.true_branches) {
        branches[label] = {{"probability", b.probability}, {"normalized_fidelity", b.normalized_fidelity()}};
    }
    s["branches_by_true_parity"] = branches;
    if (pc.mode == EngineMode::kTrajectory) {
        s["trajectories"] = r.trajectories;
        s["outcome_counts"] = r.outcome_counts;
    }
    run.finish(s);
}

void cmd_sweep(const Globals& g, const SweepArgs& a) {
    RunConfig c = prepare(g);
    SweepOptions opts = c.sweep;
    if (!a.axis.empty()) {
        opts.axis = parse_axis(a.axis);
    }
    Run run("sweep", c, g.out, c.protocol.seed);
    std::vector<LifetimeCurve> curves;
    if (a.vary == "tw") {
        if (!a.grid.empty()) {
            opts.interval_grid.clear();
            for (double v : parse_grid(a.grid)) {
                opts.interval_grid.push_back(v * kMicro);
            }
        }
        curves.push_back(sweep_wait(c.dev, c.noise, c.fm, opts));
    } else if (a.vary == "fu") {
        curves = sweep_recovery_fidelity(c.dev, c.noise, c.fm, parse_grid(a.grid.empty() ? "0.95:1.0:0.005" : a.grid),
                                         opts);
    } else if (a.vary == "t1tphi") {
        // Items are T1 or T1/T_phi in microseconds; a bare T1 keeps the configured T_phi.
        std::vector<std::pair<double, double>> pairs;
        std::stringstream ss(a.grid.empty() ? "20,30,40,50,60,70,80" : a.grid);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            const auto slash = tok.find('/');
            const double T1 = parse_grid(tok.substr(0, slash)).at(0) * kMicro;
            const double T_phi = slash == std::string::npos ? c.noise.T_phi : parse_grid(tok.substr(slash + 1)).at(0) * kMicro;
            pairs.emplace_back(T1, T_phi);
        }
        curves = sweep_coherence(c.dev, c.noise, c.fm, pairs, opts);
    } else {
        std::vector<int> steps;
        for (double v : parse_grid(a.grid.empty() ? "1:6:1" : a.grid)) {
            if (v != std::floor(v)) {
                throw ConfigError("sweep: step counts must be integers");
            }
            steps.push_back(static_cast<int>(v));
        }
        curves = sweep_steps(c.dev, c.noise, c.fm, steps, opts);
    }
    curves_csv(run, curves);
    Json s;
    s["vary"] = a.vary;
    s["time_axis"] = opts.axis == TimeAxis::kWaitsOnly ? "waits" : "full";
    s["curves"] = curves_json(curves);
    run.finish(s);
}

void cmd_budget(const Globals& g) {
    RunConfig c = prepare(g);
    Run run("budget", c, g.out, c.protocol.seed);
    const ErrorBudget b = error_budget(c.dev, c.noise, c.fm, c.protocol);
    run.csv("budget.csv", {"source", "branch", "loss"}, [&](std::ostream& o) {
        auto row = [&](const BudgetRow& r) {
            for (const auto& br : b.branches) {
                o << r.source << "," << br << "," << r.loss.at(br) << "\n";
            }
            o << r.source << ",weighted," << r.weighted << "\n";
        };
        for (const auto& r : b.rows) {
            row(r);
        }
        row(b.total);
    });
    Json s;
    s["probability"] = b.probability;
    Json rows = Json::object();
    for (const auto& r : b.rows) {
        rows[r.source] = {{"loss", r.loss}, {"weighted", r.weighted}};
    }
    rows[b.total.source] = {{"loss", b.total.loss}, {"weighted", b.total.weighted}};
    s["rows"] = rows;
    s["weighted_total_loss"] = b.total.weighted;
    s["product_defect"] = b.product_defect;
    s["sum_defect"] = b.sum_defect;
    s["tau_waits_s"] = b.lifetime_waits;
    s["tau_full_s"] = b.lifetime_full;
    run.finish(s);
}

void cmd_ramsey(const Globals& g) {
    RunConfig c = prepare(g);
    Run run("ramsey", c, g.out, c.protocol.seed);
    const RamseyResult free = ramsey_logical(false, c.dev, c.noise, c.protocol, c.fm, c.ramsey);
    const RamseyResult prot = ramsey_logical(true, c.dev, c.noise, c.protocol, c.fm, c.ramsey);
    run.csv("ramsey.csv", {"series", "time_s", "population", "contrast"}, [&](std::ostream& o) {
        for (const auto& [name, r] : {std::pair{"unprotected", &free}, std::pair{"protected", &prot}}) {
            for (std::size_t i = 0; i < r->time.size(); ++i) {
                o << name << "," << r->time[i] << "," << r->population[i] << "," << r->contrast[i] << "\n";
            }
        }
    });
    Json s;
    s["unprotected"] = {{"coherence_time_s", free.coherence_time}, {"fringe_hz", free.fringe_frequency}, {"fit", fit_json(free.fit)}};
    s["protected"] = {{"coherence_time_s", prot.coherence_time}, {"fringe_hz", prot.fringe_frequency}, {"fit", fit_json(prot.fit)}};
    s["ratio"] = prot.coherence_time / free.coherence_time;
    run.finish(s);
}

void cmd_rb(const Globals& g) {
    RunConfig c = prepare(g);
    Run run("rb", c, g.out, c.rb.seed);
    const RbResult r = randomized_benchmarking(c.dev, c.noise, c.fm, c.rb);
    run.csv("rb.csv", {"length", "survival"}, [&](std::ostream& o) {
        for (std::size_t i = 0; i < r.lengths.size(); ++i) {
            o << r.lengths[i] << "," << r.survival[i] << "\n";
        }
    });
    Json s;
    s["p"] = r.p;
    s["r_gate"] = r.r_gate;
    s["interleaved"] = c.rb.interleaved;
    s["fit"] = fit_json(r.fit);
    run.finish(s);
}

void cmd_tgate(const Globals& g) {
    RunConfig c = prepare(g);
    Run run("tgate", c, g.out, c.protocol.seed);
    const TGateResult r = t_gate_repetition(c.tgate.repeats, c.dev, c.noise, c.fm, c.tgate.n_max);
    run.csv("tgate.csv", {"repeats", "f_chi"}, [&](std::ostream& o) {
        for (std::size_t i = 0; i < r.repeats.size(); ++i) {
            o << r.repeats[i] << "," << r.fidelity[i] << "\n";
        }
    });
    Json s;
    s["per_gate_decay"] = r.per_gate_decay;
    s["gate_fidelity_rb"] = r.gate_fidelity_rb;
    s["intercept"] = r.intercept;
    s["fit"] = fit_json(r.fit);
    run.finish(s);
}

void cmd_kerr(const Globals& g) {
    RunConfig c = prepare(g);
    Run run("kerr-cal", c, g.out, c.protocol.seed);
    const KerrCalibration k = kerr_calibration(c.dev, c.noise, c.kerr);
    run.csv("kerr-cal.csv", {"scan", "t_s", "parity"}, [&](std::ostream& o) {
        for (const auto& [name, s] : {std::pair{"two", &k.two}, std::pair{"four", &k.four}}) {
            for (std::size_t i = 0; i < s->t.size(); ++i) {
                o << name << "," << s->t[i] << "," << s->parity[i] << "\n";
            }
        }
    });
    Json s;
    s["k_s_over_2pi_hz"] = k.K_s / kTwoPi;
    s["k_s_prime_over_2pi_hz"] = k.K_s_prime / kTwoPi;
    s["fringe_two_hz"] = k.two.frequency_hz;
    s["fringe_four_hz"] = k.four.frequency_hz;
    run.finish(s);
}

void cmd_qnd(const Globals& g) {
    RunConfig c = prepare(g);
    Run run("qnd-parity", c, g.out, c.qnd.options.seed);
    const QndCalibration q =
        qnd_calibrate(cplx(c.qnd.alpha, 0.0), c.qnd.tau_reps, c.dev.meas, c.noise, c.qnd.t_max, c.qnd.options);
    run.csv("qnd-parity.csv", {"tau_rep_s", "t_s", "parity"}, [&](std::ostream& o) {
        for (const auto& curve : q.curves) {
            for (std::size_t i = 0; i < curve.t.size(); ++i) {
                o << curve.tau_rep << "," << curve.t[i] << "," << curve.parity[i] << "\n";
            }
        }
    });
    Json s;
    s["p_d"] = q.p_d;
    s["oscillator_tau_s"] = q.tau_s;
    Json curves = Json::array();
    for (const auto& curve : q.curves) {
        curves.push_back({{"tau_rep_s", curve.tau_rep}, {"tau_tot_s", curve.tau_tot}, {"n_th", curve.n_th}});
    }
    s["curves"] = curves;
    run.finish(s);
}

void cmd_grape(const Globals& g) {
    RunConfig c = prepare(g);
    const GrapeSettings& gs = c.grape;
    Run run("grape", c, g.out, gs.seed);
    const ControlProblem problem = encode_problem(c.dev, gs.n_max);
    PulseSet init = PulseSet::random(gs.seed, gs.init_fraction, gs.duration, gs.dt);
    const std::array<double, kPulseChannels> bound{gs.bound_qubit, gs.bound_qubit, gs.bound_cavity, gs.bound_cavity};
    for (int j = 0; j < kPulseChannels; ++j) {
        for (double& v : init.channel[j]) {
            v *= bound[j] / init.bound[j];
        }
    }
    init.bound = bound;
    const GrapeResult r = optimize(problem, init, gs.options);
    write_pulse_csv(run.path("grape.csv"), r.pulses);
    run.keep("grape.csv");
    run.csv("grape_trace.csv", {"iteration", "fidelity"}, [&](std::ostream& o) {
        for (std::size_t i = 0; i < r.trace.size(); ++i) {
            o << i << "," << r.trace[i] << "\n";
        }
    });
    Json s;
    s["fidelity"] = r.trace.back();
    s["iterations"] = r.iterations;
    s["converged"] = r.converged;
    s["process_fidelity_with_decoherence"] = pulse_process_fidelity(problem, r.pulses, c.noise);
    run.finish(s);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Binomial-code QEC simulator"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config, std::string("INI file; defaults to $") + kConfigEnv + " or built-in values");
    app.add_option("--out", g.out, "output directory")->capture_default_str();
    app.add_option("--threads", g.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);

    std::function<void()> action;

    LifetimeArgs la;
    auto* life = app.add_subcommand("qec-lifetime", "process fidelity per QEC round and fitted lifetime");
    life->add_option("--protocol", la.protocol, "detections per round")->check(CLI::Range(1, 6));
    life->add_option("--tw", la.tw_us, "wait per step, microseconds")->check(CLI::NonNegativeNumber);
    life->add_option("--rounds", la.rounds, "QEC rounds")->check(CLI::NonNegativeNumber);
    life->add_option("--mode", la.mode)->check(CLI::IsMember({"scalar", "trajectory", "density"}));
    life->add_option("--axis", la.axis, "time axis")->check(CLI::IsMember({"waits", "full"}));
    life->add_option("--measurement", la.measurement)->check(CLI::IsMember({"scalar", "microscopic"}));
    life->add_option("--seed", la.seed)->check(CLI::NonNegativeNumber);
    life->callback([&] { action = [&] { cmd_qec_lifetime(g, la); }; });

    SweepArgs sa;
    auto* sweep = app.add_subcommand("sweep", "lifetime curves of the N-step model");
    sweep->add_option("--vary", sa.vary)->check(CLI::IsMember({"tw", "fu", "t1tphi", "steps"}))->capture_default_str();
    sweep->add_option("--grid", sa.grid,
                      "comma list or start:stop:step; tw: round interval (us), fu: fidelity, "
                      "t1tphi: T1 or T1/T_phi (us), steps: N");
    sweep->add_option("--axis", sa.axis, "time axis")->check(CLI::IsMember({"waits", "full"}));
    sweep->callback([&] { action = [&] { cmd_sweep(g, sa); }; });

    const std::vector<std::pair<std::string, std::pair<std::string, std::function<void(const Globals&)>>>> simple = {
        {"budget", {"per-branch error budget of the two-step protocol", cmd_budget}},
        {"ramsey", {"protected and unprotected logical Ramsey", cmd_ramsey}},
        {"rb", {"logical randomized benchmarking", cmd_rb}},
        {"tgate", {"repeated logical T gate", cmd_tgate}},
        {"kerr-cal", {"oscillator Kerr calibration scans", cmd_kerr}},
        {"qnd-parity", {"repeated parity monitoring and demolition fit", cmd_qnd}},
        {"grape", {"optimal-control encode pulse", cmd_grape}},
    };
    for (const auto& [name, entry] : simple) {
        auto fn = entry.second;
        app.add_subcommand(name, entry.first)->callback([&action, &g, fn] { action = [&g, fn] { fn(g); }; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    try {
        action();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const DimensionMismatch& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return 2;
    } catch (const FitDiverged& e) {
        std::cerr << "fit failed: " << e.what() << "\n";
        return 3;
    } catch (const Stalled& e) {
        std::cerr << "optimizer stalled: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
