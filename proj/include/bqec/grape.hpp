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

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bqec/device.hpp"
#include "bqec/fock.hpp"

namespace bqec {

inline constexpr int kPulseChannels = 4;

/// Piecewise-constant drive samples (rad/s) on qubit-I, qubit-Q, cavity-I, cavity-Q.
struct PulseSet {
    double duration = 528e-9;
    double dt = 2e-9;
    std::array<std::vector<double>, kPulseChannels> channel;
    // Not from the experiment: representative drive limits for this hardware class.
    std::array<double, kPulseChannels> bound{kTwoPi * 30e6, kTwoPi * 30e6, kTwoPi * 3e6, kTwoPi * 3e6};

    /// Zero samples; throws ConfigError unless duration / dt is an integer.
    static PulseSet zeros(double duration = 528e-9, double dt = 2e-9);
    /// Uniform samples within `fraction` of each bound.
    static PulseSet random(std::uint64_t seed, double fraction = 0.1, double duration = 528e-9, double dt = 2e-9);

    int samples() const;
    bool within_bounds() const;
    void validate() const;
};

struct ControlProblem {
    HilbertConfig cfg{6, true};
    Operator drift;
    // sigma_x / 2, sigma_y / 2, a + a^dagger, i (a - a^dagger)
    std::array<Operator, kPulseChannels> controls;
    // Source and target kets as columns; the target map is the partial isometry source -> target.
    Eigen::MatrixXcd source;
    Eigen::MatrixXcd target;

    int subspace_dim() const { return static_cast<int>(source.cols()); }
    void validate() const;
};

/// Dispersive drift in the oscillator frame rotating at frame_rate, with the standard controls.
ControlProblem make_control_problem(const HilbertConfig& cfg, const DeviceParams& dev,
                                    const std::vector<std::pair<Ket, Ket>>& pairs, double frame_rate = 0.0);

/// {|g,0> -> |g,0_L>, |e,0> -> |g,1_L>}
ControlProblem encode_problem(const DeviceParams& dev, int n_max = 6);

/// Product of slice exponentials, latest slice on the left.
Operator propagate(const ControlProblem& problem, const PulseSet& pulses);

enum class GradientMethod { kExact, kFirstOrder };

struct FidelityGradient {
    double fidelity = 0.0;
    // d F / d u, one vector per channel, per rad/s of drive.
    std::array<std::vector<double>, kPulseChannels> gradient;
};

/// F = |tr(T^dagger U S)|^2 / d^2.
double gate_fidelity(const ControlProblem& problem, const PulseSet& pulses);
FidelityGradient fidelity_and_gradient(const ControlProblem& problem, const PulseSet& pulses,
                                       GradientMethod method = GradientMethod::kExact);

struct GrapeOptions {
    int max_iterations = 5000;
    double target_fidelity = 0.999;
    // Weight of sum ((u[k+1] - u[k]) / bound)^2 subtracted from the objective.
    double smoothness = 1e-5;
    int patience = 200;
    double min_improvement = 1e-10;
    int memory = 10;
    GradientMethod gradient = GradientMethod::kExact;
};

struct GrapeResult {
    PulseSet pulses;
    // Gate fidelity after each accepted iteration, starting with the initial pulses.
    std::vector<double> trace;
    int iterations = 0;
    bool converged = false;
};

/// Projected quasi-Newton ascent with backtracking; every accepted step raises the objective.
/// Throws Stalled when the objective gains less than min_improvement over `patience` iterations.
GrapeResult optimize(const ControlProblem& problem, const PulseSet& init, const GrapeOptions& opts = {});

/// Plays the pulse with oscillator and ancilla decoherence and returns the normalized process
/// fidelity of the subspace map (leakage out of the target span counts as loss).
double pulse_process_fidelity(const ControlProblem& problem, const PulseSet& pulses, const NoiseParams& noise,
                              int substeps = 1);

/// CSV with header "t,qubit_i,qubit_q,cavity_i,cavity_q"; t is the slice start time.
void write_pulse_csv(const std::string& path, const PulseSet& pulses);
PulseSet read_pulse_csv(const std::string& path);

}  // namespace bqec
