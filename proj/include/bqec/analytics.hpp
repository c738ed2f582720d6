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

#include <map>
#include <string>
#include <vector>

#include "bqec/device.hpp"
#include "bqec/fidelity_model.hpp"
#include "bqec/fit.hpp"
#include "bqec/protocol.hpp"

namespace bqec {

/// Intrinsic branch table over a per-step wait grid (ascending). Results are cached per
/// (oscillator parameters, timing, steps, t_w, n_max); ancilla noise does not enter.
IntrinsicErrorTable compute_intrinsic_table(const DeviceParams& dev, const NoiseParams& noise, int steps,
                                            const std::vector<double>& t_w_grid, int n_max = 12, int threads = 0);

std::size_t intrinsic_cache_size();
void clear_intrinsic_cache();

struct BudgetRow {
    std::string source;
    // Normalized process-fidelity loss per branch label.
    std::map<std::string, double> loss;
    double weighted = 0.0;
};

struct ErrorBudget {
    std::vector<std::string> branches;
    // Branch probabilities of the fully enabled run (maximally mixed input).
    std::map<std::string, double> probability;
    // intrinsic, detection, recovery, ancilla thermal; each relative to the intrinsic run.
    std::vector<BudgetRow> rows;
    BudgetRow total;
    // max over branches of |(1 - total) - prod(1 - row)| and of |total - sum(row)|
    double product_defect = 0.0;
    double sum_defect = 0.0;
    double lifetime_waits = 0.0;
    double lifetime_full = 0.0;
};

/// Rows come from density-matrix runs with one source family enabled on top of the
/// intrinsic errors. Losses compose multiplicatively; pi pulse and encode are held ideal.
/// Branches are labeled by the true oscillator parities unless by_truth is false, in which
/// case misassigned runs are charged to the branch they were reported in.
ErrorBudget error_budget(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                         const ProtocolConfig& cfg, bool by_truth = true);

struct SweepOptions {
    // Round intervals (sum of the waits of one round); per-step wait is T_w / N.
    std::vector<double> interval_grid;
    int steps = 2;
    TimeAxis axis = TimeAxis::kWaitsOnly;
    int n_max = 12;
    int threads = 0;

    static SweepOptions defaults();
};

struct LifetimeCurve {
    std::string label;
    double parameter = 0.0;
    double parameter2 = 0.0;
    int steps = 2;
    std::vector<double> t_w;
    std::vector<double> interval;
    std::vector<double> round_fidelity;
    std::vector<double> tau;
    double best_t_w = 0.0;
    double best_tau = 0.0;
};

LifetimeCurve sweep_wait(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                         const SweepOptions& opts);
/// One curve per recovery-gate fidelity (all recovery gates set to F_U).
std::vector<LifetimeCurve> sweep_recovery_fidelity(const DeviceParams& dev, const NoiseParams& noise,
                                                   const FidelityModel& fm, const std::vector<double>& F_U,
                                                   const SweepOptions& opts);
/// One curve per (T1, T_phi) pair; parity and gate fidelities follow the linear laws.
std::vector<LifetimeCurve> sweep_coherence(const DeviceParams& dev, const NoiseParams& noise,
                                           const FidelityModel& fm,
                                           const std::vector<std::pair<double, double>>& T1_Tphi,
                                           const SweepOptions& opts);
std::vector<LifetimeCurve> sweep_steps(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                                       const std::vector<int>& steps, const SweepOptions& opts);

/// chi = -2 sqrt(K_a K_b) for self-Kerr magnitudes of two coupled modes (any common unit).
double predict_cross_kerr(double K_a, double K_b);

struct KerrScanOptions {
    int n_max = 20;
    int points = 60;
    double step_two = 4e-6;
    double step_four = 2e-6;
    double alpha_two = 0.7 * 1.4142135623730951;
    double alpha_four = 0.9 * 1.4142135623730951;
    // Fringe detuning of the |0>+|2> scan (Hz): the displacement phase advances as -pi * detuning * t,
    // so the fringe sits at K_s / 2pi + detuning.
    double detuning_hz = 10e3;
    double phase_four = kPi / 4.0;
    // Apply the scalar parity assignment fidelities to the recorded signal.
    bool readout_errors = true;
};

struct KerrScan {
    std::vector<double> t;
    std::vector<double> parity;
    FitResult fit;
    double frequency_hz = 0.0;
};

struct KerrCalibration {
    KerrScan two;
    KerrScan four;
    // Angular units.
    double K_s = 0.0;
    double K_s_prime = 0.0;
};

/// Parity-oscillation scans of (|0>+|2>)/sqrt2 and (|0>+|4>)/sqrt2 in the oscillator frame.
KerrCalibration kerr_calibration(const DeviceParams& dev, const NoiseParams& noise, const KerrScanOptions& opts = {});

}  // namespace bqec
