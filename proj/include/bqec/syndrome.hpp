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
#include <vector>

#include "bqec/device.hpp"
#include "bqec/dynamics.hpp"
#include "bqec/fit.hpp"
#include "bqec/fock.hpp"

namespace bqec {

struct ParityFidelities {
    double F0 = 1.0;
    double F1 = 1.0;
};

/// Linear decoherence model of the even/odd assignment fidelities. chi_qs is angular.
ParityFidelities parity_fidelity_model(double C0, double C1, double chi_qs, double T1, double T_phi, double T_BM,
                                       double T_AM);
ParityFidelities parity_fidelity_model(const DeviceParams& dev, const NoiseParams& noise);

/// Copy of dev.meas with P_e, P_o replaced by the linear model at the given noise.
MeasurementModel calibrated_measurement(const DeviceParams& dev, const NoiseParams& noise);

enum class MeasureMode { kScalar, kMicroscopic };

/// Amplitude-damping Kraus operators on the oscillator (loss probability gamma per photon).
std::vector<Operator> amplitude_damping_kraus(const HilbertConfig& osc, double gamma);

/// Parity syndrome measurement on a joint ancilla-oscillator state.
///
/// Scalar mode is instantaneous: the reported bit is parity XOR ancilla, flipped with
/// probability 1 - P_e or 1 - P_o; the ancilla is left in |reported>. Microscopic mode plays
/// the Ramsey sequence with decoherence and consumes parity_wait + T_BM + T_AM. Both modes
/// finish with demolition, an amplitude-damping kick of strength p_d.
class ParityMeter {
  public:
    ParityMeter(const HilbertConfig& cfg, const DeviceParams& dev, const NoiseParams& noise,
                const MeasurementModel& model, double frame_rate = 0.0);

    int measure(Ket& psi, Rng& rng, MeasureMode mode) const;
    /// Unnormalized post-measurement branches indexed by the reported outcome.
    std::array<Operator, 2> measure(const Operator& rho, MeasureMode mode) const;

    /// Wall time consumed by microscopic mode.
    double duration() const { return wait_ + model_.T_BM + model_.T_AM; }
    const MeasurementModel& model() const { return model_; }
    const HilbertConfig& config() const { return cfg_; }

  private:
    void demolish(Ket& psi, Rng& rng) const;
    Operator demolish(const Operator& rho) const;
    int scalar(Ket& psi, Rng& rng) const;
    int microscopic(Ket& psi, Rng& rng) const;
    double flip_probability(int raw) const;

    HilbertConfig cfg_;
    MeasurementModel model_;
    double wait_ = 0.0;
    std::array<Operator, 2> parity_proj_;
    std::array<Operator, 2> ancilla_proj_;
    // shift_[a][r] = |r><a| on the ancilla.
    std::array<std::array<Operator, 2>, 2> shift_;
    Operator half_pi_;
    Operator half_pi_inv_;
    std::vector<Operator> damping_;
    JumpEvolver wait_jump_;
    JumpEvolver before_jump_;
    JumpEvolver after_jump_;
    LindbladPropagator wait_map_;
    LindbladPropagator before_map_;
    LindbladPropagator after_map_;
};

/// Effective assignment fidelities of the microscopic sequence for mean-photon-two inputs:
/// the probability that the reported bit and the ancilla at the end of the window both
/// match the true parity.
ParityFidelities microscopic_parity_fidelities(const HilbertConfig& cfg, const DeviceParams& dev,
                                               const NoiseParams& noise, const MeasurementModel& model);

struct QndOptions {
    int n_max = 16;
    // Number of single-shot repetitions averaged per time point; 0 gives exact expectations.
    int shots = 0;
    int max_points = 60;
    std::uint64_t seed = 1;
};

struct QndCurve {
    double tau_rep = 0.0;
    std::vector<double> t;
    std::vector<double> parity;
    FitResult fit;
    double tau_tot = 0.0;
    double n_th = 0.0;
};

/// Closed-form monitored parity of a displaced thermal state.
double qnd_parity_model(double t, double alpha_sq, double tau_tot, double n_th, double P_e, double P_o);

/// Repeated parity monitoring of a coherent state with ancilla reset after each shot, followed by a
/// fit of the monitored-parity model for tau_tot and the steady-state thermal population.
QndCurve qnd_parity_decay(cplx alpha, double tau_rep, const MeasurementModel& model, const NoiseParams& noise,
                          double t_max, const QndOptions& opts = {});

struct QndCalibration {
    std::vector<QndCurve> curves;
    // From 1/tau_tot = 1/tau_s + p_d / tau_rep.
    double p_d = 0.0;
    double tau_s = 0.0;
};

QndCalibration qnd_calibrate(cplx alpha, const std::vector<double>& tau_reps, const MeasurementModel& model,
                             const NoiseParams& noise, double t_max, const QndOptions& opts = {});

}  // namespace bqec
