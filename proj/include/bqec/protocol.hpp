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
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "bqec/code.hpp"
#include "bqec/device.hpp"
#include "bqec/dynamics.hpp"
#include "bqec/fidelity_model.hpp"
#include "bqec/fit.hpp"
#include "bqec/syndrome.hpp"
#include "bqec/tomography.hpp"

namespace bqec {

enum class EngineMode { kScalarModel, kTrajectory, kDensityMatrix };

/// Independently switchable error sources.
struct ErrorSources {
    bool cavity_loss = true;
    bool kerr = true;
    // Assignment errors and demolition of the parity measurement.
    bool detection = true;
    // Depolarizing infidelity of the recovery gates.
    bool recovery = true;
    // Ancilla decay, thermal excitation and dephasing outside the measurement.
    bool ancilla = true;
    bool pi_pulse = true;
    bool encode = true;

    /// Oscillator decay and Kerr only, with ideal gates and measurements.
    static ErrorSources intrinsic_only();
};

struct ProtocolConfig {
    // 1 is the one-step protocol, 2 the two-step protocol.
    int steps_per_round = 2;
    double t_w = 17.895e-6;
    int n_rounds = 1;
    EngineMode mode = EngineMode::kDensityMatrix;
    MeasureMode measurement = MeasureMode::kScalar;
    ErrorSources sources;
    TimeAxis time_axis = TimeAxis::kWaitsOnly;
    int n_max = 12;
    // Trajectory mode: trajectories per tomography input.
    int trajectories = 2000;
    std::uint64_t seed = 1;
    // Trajectory mode: how many trajectories keep full round records.
    int record_limit = 8;
    int threads = 0;

    void validate() const;
};

struct RoundRecord {
    std::vector<int> outcomes;
    std::vector<std::string> gates;
    std::string branch;
    double elapsed = 0.0;
};

struct BranchResult {
    // Probability for the maximally mixed logical input.
    double probability = 0.0;
    // Probability for (|0_L> + |1_L>)/sqrt(2).
    double probability_representative = 0.0;
    // Process matrix of the branch, normalized to unit trace.
    ChiMatrix chi;
    double normalized_fidelity() const;
};

struct QecResult {
    // Index n: after n rounds (n = 0 is the encode-decode round trip).
    std::vector<double> time;
    std::vector<double> time_full;
    std::vector<double> time_waits;
    std::vector<double> fidelity;
    std::vector<ChiMatrix> chi;
    // First-round branches by reported outcomes and by true oscillator parities.
    std::map<std::string, BranchResult> reported_branches;
    std::map<std::string, BranchResult> true_branches;
    std::vector<RoundRecord> records;
    // Trajectory mode: first-round outcome counts over all trajectories.
    std::map<std::string, long> outcome_counts;
    long trajectories = 0;
};

/// Builds every operator, channel and propagator of a protocol once.
class QecEngine {
  public:
    QecEngine(const ProtocolConfig& cfg, const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm);
    ~QecEngine();
    QecEngine(const QecEngine&) = delete;
    QecEngine& operator=(const QecEngine&) = delete;

    QecResult run() const;

    /// Trajectory run of one logical input; returns the decoded ancilla state after each round.
    std::vector<Qubit2> run_state(const Eigen::Vector2cd& logical, std::uint64_t trajectory,
                                  std::vector<RoundRecord>* records = nullptr) const;

    const ProtocolTiming& timing() const;
    const GateSet& gates() const;
    const HilbertConfig& config() const;

    struct Impl;

  private:
    std::unique_ptr<Impl> impl_;
};

QecResult run_qec(const ProtocolConfig& cfg, const DeviceParams& dev, const NoiseParams& noise,
                  const FidelityModel& fm);

/// Decoded output states of one logical input under trajectory simulation.
std::vector<Qubit2> run_qec_state(const Eigen::Vector2cd& logical, const ProtocolConfig& cfg, const DeviceParams& dev,
                                  const NoiseParams& noise, const FidelityModel& fm,
                                  std::vector<RoundRecord>* records = nullptr);

/// Fit of 0.25 + A exp(-t/tau) to a time series of process fidelities.
FitResult fit_lifetime(const std::vector<double>& t, const std::vector<double>& F_chi);

enum class Encoding { kFock01, kBinomial, kTransmon };

struct UncorrectedOptions {
    int n_max = 12;
    // Binomial waits are multiples of the four-photon Kerr period; others use this spacing.
    double spacing = 20e-6;
    int points = 16;
};

struct DecayCurve {
    std::vector<double> time;
    std::vector<double> fidelity;
    FitResult fit;
    double tau = 0.0;
};

/// Kerr period of |4> in the interaction frame, 2 pi / |E4|.
double four_photon_kerr_period(const DeviceParams& dev);

DecayCurve run_uncorrected(Encoding encoding, const DeviceParams& dev, const NoiseParams& noise,
                           const UncorrectedOptions& opts = {});

struct RamseyOptions {
    int n_max = 12;
    int points = 24;
    // Unprotected: sample spacing; 0 samples at multiples of the four-photon Kerr period
    // (|0> and |4> are degenerate in the simulation frame, so any spacing is valid).
    double unprotected_spacing = 6e-6;
    int unprotected_points = 40;
    int kerr_periods_per_point = 1;
    // Protected: rounds per point and artificial detuning of the final rotation axis (Hz).
    int rounds_per_point = 1;
    double detuning_hz = 10e3;
};

struct RamseyResult {
    std::vector<double> time;
    // Phase-cycled ancilla |g> population (1 + P_g(phi) - P_g(phi + pi)) / 2 after decoding.
    std::vector<double> population;
    // Decoded logical coherence 2|rho_01| before the final pulse; not accessible in the lab.
    std::vector<double> contrast;
    FitResult fit;
    double coherence_time = 0.0;
    double fringe_frequency = 0.0;
};

RamseyResult ramsey_logical(bool protect, const DeviceParams& dev, const NoiseParams& noise, const ProtocolConfig& cfg,
                            const FidelityModel& fm, const RamseyOptions& opts = {});

struct RbOptions {
    std::vector<int> lengths{1, 5, 10, 15, 20, 25, 30, 40};
    int sequences = 100;
    // Index into the Clifford group of an interleaved gate, or -1.
    int interleaved = -1;
    std::uint64_t seed = 7;
    // Depolarizing strength of each Clifford in the RB convention 1 - p/2; 1 for ideal gates.
    double gate_fidelity_rb = 0.969;
};

struct RbResult {
    std::vector<int> lengths;
    std::vector<double> survival;
    FitResult fit;
    double p = 1.0;
    double r_gate = 0.0;
};

/// Logical randomized benchmarking: EN, m random Cliffords plus the inverting Clifford, DE.
RbResult randomized_benchmarking(const DeviceParams& dev, const NoiseParams& noise, const FidelityModel& fm,
                                 const RbOptions& opts, int n_max = 8);

struct TGateResult {
    std::vector<int> repeats;
    std::vector<double> fidelity;
    FitResult fit;
    double per_gate_decay = 1.0;
    double gate_fidelity_rb = 1.0;
    double intercept = 1.0;
};

TGateResult t_gate_repetition(const std::vector<int>& repeats, const DeviceParams& dev, const NoiseParams& noise,
                              const FidelityModel& fm, int n_max = 8);

/// Intrinsic-error point: oscillator decay and Kerr only, ideal gates and parity projections.
IntrinsicPoint intrinsic_point(const DeviceParams& dev, const NoiseParams& noise, int steps, double t_w, int n_max = 12);

/// Two-level process fidelity of the bare ancilla after time t.
double transmon_process_fidelity(const NoiseParams& noise, double t);

}  // namespace bqec
