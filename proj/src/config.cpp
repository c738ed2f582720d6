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

#include "bqec/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <optional>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "bqec/errors.hpp"

namespace bqec {

namespace {

struct Value {
    double number = 0.0;
    long integer = 0;
    std::string text;
    std::vector<double> numbers;
    std::vector<long> integers;
};

// Overrides of model fidelities that otherwise follow from the device.
struct Overrides {
    std::map<std::string, double> fidelity;
};

struct Entry {
    std::string section;
    std::string key;
    KeySpec spec;
    std::function<void(RunConfig&, Overrides&, const Value&)> set;
    std::function<Value(const RunConfig&)> get;
};

Value num(double v) {
    Value x;
    x.number = v;
    return x;
}

Value integer(long v) {
    Value x;
    x.integer = v;
    return x;
}

Value text(std::string v) {
    Value x;
    x.text = std::move(v);
    return x;
}

#define BQEC_NUMBER(SEC, KEY, REQ, HELP, FIELD, SCALE)                                                   \
    Entry {                                                                                            \
        SEC, KEY, {KeyKind::kNumber, REQ, HELP},                                                       \
            [](RunConfig& c, Overrides&, const Value& v) { c.FIELD = v.number * (SCALE); },            \
            [](const RunConfig& c) { return num(c.FIELD / (SCALE)); }                                  \
    }

#define BQEC_INTEGER(SEC, KEY, HELP, FIELD)                                                               \
    Entry {                                                                                            \
        SEC, KEY, {KeyKind::kInteger, false, HELP},                                                    \
            [](RunConfig& c, Overrides&, const Value& v) { c.FIELD = static_cast<decltype(c.FIELD)>(v.integer); }, \
            [](const RunConfig& c) { return integer(static_cast<long>(c.FIELD)); }                     \
    }

#define BQEC_OVERRIDE(KEY, HELP, FIELD)                                                                   \
    Entry {                                                                                            \
        "fidelity", KEY, {KeyKind::kNumber, false, HELP},                                              \
            [](RunConfig&, Overrides& o, const Value& v) { o.fidelity[KEY] = v.number; },              \
            [](const RunConfig& c) { return num(c.fm.FIELD); }                                         \
    }

template <typename E>
struct Names {
    std::vector<std::pair<E, std::string>> pairs;

    E parse(const std::string& s, const std::string& key) const {
        for (const auto& [e, name] : pairs) {
            if (name == s) {
                return e;
            }
        }
        throw ConfigError("config: invalid value '" + s + "' for " + key);
    }
    std::string name(E e) const {
        for (const auto& [x, name] : pairs) {
            if (x == e) {
                return name;
            }
        }
        return "?";
    }
};

const Names<EngineMode> kModes{
    {{EngineMode::kScalarModel, "scalar"}, {EngineMode::kTrajectory, "trajectory"}, {EngineMode::kDensityMatrix, "density"}}};
const Names<MeasureMode> kMeasure{{{MeasureMode::kScalar, "scalar"}, {MeasureMode::kMicroscopic, "microscopic"}}};
const Names<TimeAxis> kAxes{{{TimeAxis::kWaitsOnly, "waits"}, {TimeAxis::kFullDuration, "full"}}};

template <typename T>
std::vector<long> as_longs(const std::vector<T>& v) {
    return std::vector<long>(v.begin(), v.end());
}

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = [] {
        std::vector<Entry> t = {
            // Hamiltonian parameters (/2pi, Hz).
            BQEC_NUMBER("hamiltonian", "chi_qs_over_2pi_hz", true, "ancilla-oscillator dispersive shift", dev.chi_qs, kTwoPi),
            BQEC_NUMBER("hamiltonian", "k_s_over_2pi_hz", true, "oscillator self-Kerr", dev.K_s, kTwoPi),
            BQEC_NUMBER("hamiltonian", "k_s_prime_over_2pi_hz", true, "oscillator Kerr correction", dev.K_s_prime, kTwoPi),
            BQEC_NUMBER("hamiltonian", "chi_qr_over_2pi_hz", false, "stored only", dev.chi_qr, kTwoPi),
            BQEC_NUMBER("hamiltonian", "chi_sr_over_2pi_hz", false, "stored only", dev.chi_sr, kTwoPi),
            BQEC_NUMBER("hamiltonian", "k_q_over_2pi_hz", false, "stored only", dev.K_q, kTwoPi),
            BQEC_NUMBER("hamiltonian", "k_r_over_2pi_hz", false, "stored only", dev.K_r, kTwoPi),
            BQEC_NUMBER("hamiltonian", "omega_q_over_2pi_hz", false, "stored only", dev.omega_q, kTwoPi),
            BQEC_NUMBER("hamiltonian", "omega_s_over_2pi_hz", false, "stored only", dev.omega_s, kTwoPi),
            BQEC_NUMBER("hamiltonian", "omega_r_over_2pi_hz", false, "stored only", dev.omega_r, kTwoPi),
            // Coherence times and thermal populations.
            BQEC_NUMBER("coherence", "ancilla_t1_s", true, "ancilla energy relaxation", noise.T1, 1.0),
            BQEC_NUMBER("coherence", "ancilla_tphi_s", true, "ancilla pure dephasing", noise.T_phi, 1.0),
            Entry{"coherence", "ancilla_ground_population", {KeyKind::kNumber, true, "1 - n_th of the ancilla"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.noise.n_th_q = 1.0 - v.number; },
                  [](const RunConfig& c) { return num(1.0 - c.noise.n_th_q); }},
            Entry{"coherence", "oscillator_tau_s", {KeyKind::kNumber, true, "oscillator energy decay time"},
                  [](RunConfig& c, Overrides&, const Value& v) {
                      if (!(v.number > 0.0)) {
                          throw ConfigError("config: coherence.oscillator_tau_s must be positive");
                      }
                      c.noise.kappa_s = 1.0 / v.number;
                  },
                  [](const RunConfig& c) { return num(1.0 / c.noise.kappa_s); }},
            Entry{"coherence", "oscillator_ground_population", {KeyKind::kNumber, true, "1 - n_th of the oscillator"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.noise.n_th_s = 1.0 - v.number; },
                  [](const RunConfig& c) { return num(1.0 - c.noise.n_th_s); }},
            // Parity measurement.
            BQEC_NUMBER("measurement", "c0", false, "pulse-limited even-parity fidelity", dev.meas.C0, 1.0),
            BQEC_NUMBER("measurement", "c1", false, "pulse-limited odd-parity fidelity", dev.meas.C1, 1.0),
            BQEC_NUMBER("measurement", "p_e", false, "even assignment fidelity", dev.meas.P_e, 1.0),
            BQEC_NUMBER("measurement", "p_o", false, "odd assignment fidelity", dev.meas.P_o, 1.0),
            BQEC_NUMBER("measurement", "p_d", false, "demolition probability per measurement", dev.meas.p_d, 1.0),
            BQEC_NUMBER("measurement", "t_bm_s", false, "wait before the ancilla readout", dev.meas.T_BM, 1.0),
            BQEC_NUMBER("measurement", "t_am_s", false, "readout to feedback, includes latency", dev.meas.T_AM, 1.0),
            BQEC_NUMBER("measurement", "latency_s", false, "feedback latency", dev.meas.latency, 1.0),
            BQEC_NUMBER("measurement", "readout_g", false, "ancilla |g> readout fidelity", dev.meas.readout_g, 1.0),
            BQEC_NUMBER("measurement", "readout_e", false, "ancilla |e> readout fidelity", dev.meas.readout_e, 1.0),
            // Gate fidelities not derived from coherence.
            BQEC_NUMBER("fidelity", "f_pi", false, "ancilla pi pulse", fm.F_pi, 1.0),
            BQEC_NUMBER("fidelity", "f_encode", false, "encode gate", fm.F_encode, 1.0),
            BQEC_NUMBER("fidelity", "f_decode", false, "decode gate", fm.F_decode, 1.0),
            BQEC_NUMBER("fidelity", "f_clifford_rb", false, "logical Clifford, 1 - p/2 convention", fm.F_clifford_rb, 1.0),
            BQEC_NUMBER("fidelity", "f_t_rb", false, "logical T gate, 1 - p/2 convention", fm.F_T_rb, 1.0),
            BQEC_OVERRIDE("f0", "even detection fidelity (default: linear model)", F0),
            BQEC_OVERRIDE("f1", "odd detection fidelity (default: linear model)", F1),
            BQEC_OVERRIDE("f_u1", "one-step even recovery (default: law)", F_U1),
            BQEC_OVERRIDE("f_u2", "odd recovery (default: law)", F_U2),
            BQEC_OVERRIDE("f_u3", "final even recovery (default: law)", F_U3),
            BQEC_OVERRIDE("f_u4", "final odd recovery (default: law)", F_U4),
            // Protocol.
            BQEC_INTEGER("protocol", "steps", "detections per round (1..6)", protocol.steps_per_round),
            BQEC_NUMBER("protocol", "t_w_s", false, "wait per step", protocol.t_w, 1.0),
            BQEC_INTEGER("protocol", "rounds", "QEC rounds", protocol.n_rounds),
            BQEC_INTEGER("protocol", "n_max", "oscillator truncation", protocol.n_max),
            BQEC_INTEGER("protocol", "trajectories", "trajectories per tomography input", protocol.trajectories),
            BQEC_INTEGER("protocol", "seed", "master seed", protocol.seed),
            BQEC_INTEGER("protocol", "record_limit", "trajectories keeping round records", protocol.record_limit),
            BQEC_INTEGER("protocol", "threads", "worker threads, 0 = hardware", protocol.threads),
            Entry{"protocol", "mode", {KeyKind::kText, false, "scalar | trajectory | density"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.protocol.mode = kModes.parse(v.text, "protocol.mode"); },
                  [](const RunConfig& c) { return text(kModes.name(c.protocol.mode)); }},
            Entry{"protocol", "measurement", {KeyKind::kText, false, "scalar | microscopic"},
                  [](RunConfig& c, Overrides&, const Value& v) {
                      c.protocol.measurement = kMeasure.parse(v.text, "protocol.measurement");
                  },
                  [](const RunConfig& c) { return text(kMeasure.name(c.protocol.measurement)); }},
            Entry{"protocol", "time_axis", {KeyKind::kText, false, "waits | full"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.protocol.time_axis = kAxes.parse(v.text, "protocol.time_axis"); },
                  [](const RunConfig& c) { return text(kAxes.name(c.protocol.time_axis)); }},
            // Uncorrected baselines.
            BQEC_INTEGER("uncorrected", "n_max", "oscillator truncation", uncorrected.n_max),
            BQEC_NUMBER("uncorrected", "spacing_s", false, "sample spacing (Fock, transmon)", uncorrected.spacing, 1.0),
            BQEC_INTEGER("uncorrected", "points", "samples per curve", uncorrected.points),
            // Ramsey.
            BQEC_INTEGER("ramsey", "n_max", "oscillator truncation", ramsey.n_max),
            BQEC_INTEGER("ramsey", "points", "protected samples", ramsey.points),
            BQEC_INTEGER("ramsey", "rounds_per_point", "QEC rounds between protected samples", ramsey.rounds_per_point),
            BQEC_NUMBER("ramsey", "detuning_hz", false, "artificial detuning of the final pulse", ramsey.detuning_hz, 1.0),
            BQEC_NUMBER("ramsey", "unprotected_spacing_s", false, "unprotected sample spacing, 0 = Kerr period", ramsey.unprotected_spacing, 1.0),
            BQEC_INTEGER("ramsey", "unprotected_points", "unprotected samples", ramsey.unprotected_points),
            // Randomized benchmarking and T gate.
            Entry{"rb", "lengths", {KeyKind::kIntegerList, false, "sequence lengths"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.rb.lengths.assign(v.integers.begin(), v.integers.end()); },
                  [](const RunConfig& c) { Value x; x.integers = as_longs(c.rb.lengths); return x; }},
            BQEC_INTEGER("rb", "sequences", "random sequences per length", rb.sequences),
            BQEC_INTEGER("rb", "seed", "sequence seed", rb.seed),
            BQEC_INTEGER("rb", "interleaved", "interleaved Clifford index, -1 = none", rb.interleaved),
            Entry{"tgate", "repeats", {KeyKind::kIntegerList, false, "T gate repetition counts"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.tgate.repeats.assign(v.integers.begin(), v.integers.end()); },
                  [](const RunConfig& c) { Value x; x.integers = as_longs(c.tgate.repeats); return x; }},
            BQEC_INTEGER("tgate", "n_max", "oscillator truncation", tgate.n_max),
            // Kerr calibration.
            BQEC_INTEGER("kerr", "n_max", "oscillator truncation", kerr.n_max),
            BQEC_INTEGER("kerr", "points", "samples per scan", kerr.points),
            BQEC_NUMBER("kerr", "step_two_s", false, "sample step of the |0>+|2> scan", kerr.step_two, 1.0),
            BQEC_NUMBER("kerr", "step_four_s", false, "sample step of the |0>+|4> scan", kerr.step_four, 1.0),
            BQEC_NUMBER("kerr", "alpha_two", false, "displacement of the |0>+|2> scan", kerr.alpha_two, 1.0),
            BQEC_NUMBER("kerr", "alpha_four", false, "displacement of the |0>+|4> scan", kerr.alpha_four, 1.0),
            BQEC_NUMBER("kerr", "detuning_hz", false, "fringe detuning of the |0>+|2> scan", kerr.detuning_hz, 1.0),
            BQEC_NUMBER("kerr", "phase_four_rad", false, "fixed displacement phase of the |0>+|4> scan", kerr.phase_four, 1.0),
            BQEC_INTEGER("kerr", "readout_errors", "1 applies parity assignment errors", kerr.readout_errors),
            // QND parity calibration.
            BQEC_NUMBER("qnd", "alpha", false, "coherent-state amplitude", qnd.alpha, 1.0),
            Entry{"qnd", "tau_reps_s", {KeyKind::kNumberList, false, "parity repetition intervals"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.qnd.tau_reps = v.numbers; },
                  [](const RunConfig& c) { Value x; x.numbers = c.qnd.tau_reps; return x; }},
            BQEC_NUMBER("qnd", "t_max_s", false, "monitoring time", qnd.t_max, 1.0),
            BQEC_INTEGER("qnd", "shots", "single shots per point, 0 = exact", qnd.options.shots),
            BQEC_INTEGER("qnd", "max_points", "points per curve", qnd.options.max_points),
            BQEC_INTEGER("qnd", "n_max", "oscillator truncation", qnd.options.n_max),
            BQEC_INTEGER("qnd", "seed", "shot-noise seed", qnd.options.seed),
            // GRAPE.
            BQEC_INTEGER("grape", "n_max", "oscillator truncation", grape.n_max),
            BQEC_NUMBER("grape", "duration_s", false, "pulse duration", grape.duration, 1.0),
            BQEC_NUMBER("grape", "dt_s", false, "sample interval", grape.dt, 1.0),
            BQEC_NUMBER("grape", "bound_qubit_over_2pi_hz", false, "qubit drive bound", grape.bound_qubit, kTwoPi),
            BQEC_NUMBER("grape", "bound_cavity_over_2pi_hz", false, "cavity drive bound", grape.bound_cavity, kTwoPi),
            BQEC_INTEGER("grape", "iterations", "iteration cap", grape.options.max_iterations),
            BQEC_NUMBER("grape", "target_fidelity", false, "stop once reached", grape.options.target_fidelity, 1.0),
            BQEC_NUMBER("grape", "smoothness", false, "weight of the sample-difference penalty", grape.options.smoothness, 1.0),
            BQEC_INTEGER("grape", "patience", "iterations without gain before Stalled", grape.options.patience),
            BQEC_INTEGER("grape", "seed", "random initial pulse seed", grape.seed),
            BQEC_NUMBER("grape", "init_fraction", false, "initial amplitude as a fraction of the bound", grape.init_fraction, 1.0),
            // Lifetime sweeps.
            Entry{"sweep", "intervals_s", {KeyKind::kNumberList, false, "round intervals N t_w"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.sweep.interval_grid = v.numbers; },
                  [](const RunConfig& c) { Value x; x.numbers = c.sweep.interval_grid; return x; }},
            BQEC_INTEGER("sweep", "steps", "detections per round", sweep.steps),
            BQEC_INTEGER("sweep", "n_max", "oscillator truncation", sweep.n_max),
            BQEC_INTEGER("sweep", "threads", "worker threads, 0 = hardware", sweep.threads),
            Entry{"sweep", "time_axis", {KeyKind::kText, false, "waits | full"},
                  [](RunConfig& c, Overrides&, const Value& v) { c.sweep.axis = kAxes.parse(v.text, "sweep.time_axis"); },
                  [](const RunConfig& c) { return text(kAxes.name(c.sweep.axis)); }},
        };
        return t;
    }();
    return table;
}

#undef BQEC_NUMBER
#undef BQEC_INTEGER
#undef BQEC_OVERRIDE

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    const auto e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

Value parse_value(const Entry& e, const std::string& raw) {
    const std::string where = e.section + "." + e.key;
    const std::string s = trim(raw);
    Value v;
    auto number = [&](const std::string& tok) {
        std::size_t used = 0;
        double x = 0.0;
        try {
            x = std::stod(tok, &used);
        } catch (const std::exception&) {
            throw ConfigError("config: " + where + " expects a number, got '" + tok + "'");
        }
        if (used != tok.size() || !std::isfinite(x)) {
            throw ConfigError("config: " + where + " expects a number, got '" + tok + "'");
        }
        return x;
    };
    auto whole = [&](const std::string& tok) {
        const double x = number(tok);
        if (x != std::floor(x) || std::abs(x) > 9e15) {
            throw ConfigError("config: " + where + " expects an integer, got '" + tok + "'");
        }
        return static_cast<long>(x);
    };
    auto split = [&]() {
        std::vector<std::string> out;
        std::stringstream ss(s);
        std::string tok;
        while (std::getline(ss, tok, ',')) {
            out.push_back(trim(tok));
        }
        if (out.empty()) {
            throw ConfigError("config: " + where + " expects a comma-separated list");
        }
        return out;
    };
    switch (e.spec.kind) {
        case KeyKind::kNumber:
            v.number = number(s);
            break;
        case KeyKind::kInteger:
            v.integer = whole(s);
            break;
        case KeyKind::kText:
            v.text = s;
            break;
        case KeyKind::kNumberList:
            for (const auto& tok : split()) {
                v.numbers.push_back(number(tok));
            }
            break;
        case KeyKind::kIntegerList:
            for (const auto& tok : split()) {
                v.integers.push_back(whole(tok));
            }
            break;
    }
    return v;
}

std::string format_value(const Entry& e, const Value& v) {
    std::ostringstream os;
    os << std::setprecision(12);
    switch (e.spec.kind) {
        case KeyKind::kNumber:
            os << v.number;
            break;
        case KeyKind::kInteger:
            os << v.integer;
            break;
        case KeyKind::kText:
            os << v.text;
            break;
        case KeyKind::kNumberList:
            for (std::size_t i = 0; i < v.numbers.size(); ++i) {
                os << (i ? ", " : "") << v.numbers[i];
            }
            break;
        case KeyKind::kIntegerList:
            for (std::size_t i = 0; i < v.integers.size(); ++i) {
                os << (i ? ", " : "") << v.integers[i];
            }
            break;
    }
    return os.str();
}

void finalize(RunConfig& c, const Overrides& o) {
    c.noise.validate();
    c.dev.noise = c.noise;
    c.dev.validate();
    const FidelityModel base = c.fm;
    c.fm = FidelityModel::from_device(c.dev, c.noise);
    c.fm.F_pi = base.F_pi;
    c.fm.F_encode = base.F_encode;
    c.fm.F_decode = base.F_decode;
    c.fm.F_clifford_rb = base.F_clifford_rb;
    c.fm.F_T_rb = base.F_T_rb;
    for (const auto& [key, v] : o.fidelity) {
        double* slot = key == "f0"     ? &c.fm.F0
                       : key == "f1"   ? &c.fm.F1
                       : key == "f_u1" ? &c.fm.F_U1
                       : key == "f_u2" ? &c.fm.F_U2
                       : key == "f_u3" ? &c.fm.F_U3
                                       : &c.fm.F_U4;
        *slot = v;
    }
    c.fm.validate();
    c.rb.gate_fidelity_rb = c.fm.F_clifford_rb;
    c.protocol.validate();
    if (c.sweep.interval_grid.empty() || c.sweep.steps < 1 || c.sweep.steps > 6) {
        throw ConfigError("config: sweep needs a non-empty interval grid and 1..6 steps");
    }
    if (c.rb.lengths.empty() || c.rb.sequences < 1 || c.tgate.repeats.empty() || c.qnd.tau_reps.size() < 2) {
        throw ConfigError("config: rb, tgate and qnd lists must be non-empty (qnd needs two intervals)");
    }
    if (c.grape.init_fraction < 0.0 || c.grape.init_fraction > 1.0) {
        throw ConfigError("config: grape.init_fraction must lie in [0, 1]");
    }

    std::vector<std::string> lines;
    for (const Entry& e : entries()) {
        lines.push_back(e.section + "." + e.key + " = " + format_value(e, e.get(c)));
    }
    std::sort(lines.begin(), lines.end());
    c.canonical.clear();
    for (const auto& l : lines) {
        c.canonical += l + "\n";
    }
}

}  // namespace

const std::map<std::string, std::map<std::string, KeySpec>>& config_schema() {
    static const auto schema = [] {
        std::map<std::string, std::map<std::string, KeySpec>> s;
        for (const Entry& e : entries()) {
            s[e.section][e.key] = e.spec;
        }
        return s;
    }();
    return schema;
}

std::uint64_t RunConfig::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : canonical) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    return h;
}

RunConfig default_config() {
    RunConfig c;
    finalize(c, {});
    return c;
}

RunConfig parse_config(std::istream& in, const std::string& origin) {
    boost::property_tree::ptree tree;
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("config: " + origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    const auto& schema = config_schema();
    RunConfig c;
    Overrides o;
    for (const auto& [section, keys] : tree) {
        const auto sec = schema.find(section);
        if (sec == schema.end()) {
            throw ConfigError("config: " + origin + ": unknown section [" + section + "]");
        }
        if (keys.empty() && !keys.data().empty()) {
            throw ConfigError("config: " + origin + ": key '" + section + "' outside any section");
        }
        for (const auto& [key, node] : keys) {
            if (sec->second.find(key) == sec->second.end()) {
                throw ConfigError("config: " + origin + ": unknown key " + section + "." + key);
            }
        }
    }
    for (const Entry& e : entries()) {
        const auto node = tree.get_child_optional(boost::property_tree::ptree::path_type(e.section + "/" + e.key, '/'));
        if (!node) {
            if (e.spec.required) {
                throw ConfigError("config: " + origin + ": missing required key " + e.section + "." + e.key);
            }
            continue;
        }
        e.set(c, o, parse_value(e, node->data()));
    }
    finalize(c, o);
    return c;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("config: cannot open " + path);
    }
    return parse_config(in, path);
}

RunConfig resolve_config(const std::string& path) {
    if (!path.empty()) {
        return load_config(path);
    }
    if (const char* env = std::getenv(kConfigEnv); env != nullptr && *env != '\0') {
        return load_config(env);
    }
    return default_config();
}

}  // namespace bqec
