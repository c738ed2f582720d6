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

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "bqec/analytics.hpp"
#include "bqec/device.hpp"
#include "bqec/fidelity_model.hpp"
#include "bqec/grape.hpp"
#include "bqec/protocol.hpp"
#include "bqec/syndrome.hpp"

namespace bqec {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "BQEC_CONFIG";

enum class KeyKind { kNumber, kInteger, kText, kNumberList, kIntegerList };

struct KeySpec {
    KeyKind kind = KeyKind::kNumber;
    // Keys of the simulated subset must be present in any config file.
    bool required = false;
    std::string help;
};

/// section -> key -> spec. Frequencies are /2pi values in Hz; times are seconds.
const std::map<std::string, std::map<std::string, KeySpec>>& config_schema();

struct QndSettings {
    double alpha = 1.4142135623730951;
    std::vector<double> tau_reps{1e-6, 2e-6, 5e-6, 10e-6, 30e-6};
    double t_max = 600e-6;
    QndOptions options;
};

struct GrapeSettings {
    int n_max = 6;
    double duration = 528e-9;
    double dt = 2e-9;
    double bound_qubit = kTwoPi * 30e6;
    double bound_cavity = kTwoPi * 3e6;
    double init_fraction = 0.1;
    std::uint64_t seed = 1;
    GrapeOptions options;
};

struct TGateSettings {
    std::vector<int> repeats{0, 5, 10, 20, 30, 40, 50, 60};
    int n_max = 8;
};

struct RunConfig {
    DeviceParams dev;
    NoiseParams noise;
    FidelityModel fm;
    ProtocolConfig protocol;
    UncorrectedOptions uncorrected;
    RamseyOptions ramsey;
    RbOptions rb;
    TGateSettings tgate;
    KerrScanOptions kerr;
    QndSettings qnd;
    GrapeSettings grape;
    SweepOptions sweep = SweepOptions::defaults();
    // Sorted "section.key = value" lines of every key that was read.
    std::string canonical;

    /// FNV-1a of the canonical text.
    std::uint64_t hash() const;
};

/// Built-in defaults; identical to the bundled config/default.ini.
RunConfig default_config();

/// Parses an INI stream. Unknown sections or keys, malformed values and missing required
/// keys throw ConfigError; the result is validated before it is returned.
RunConfig parse_config(std::istream& in, const std::string& origin = "<stream>");
RunConfig load_config(const std::string& path);

/// Explicit path if non-empty, else the path in BQEC_CONFIG, else the built-in defaults.
RunConfig resolve_config(const std::string& path);

}  // namespace bqec
