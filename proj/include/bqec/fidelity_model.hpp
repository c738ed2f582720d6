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

namespace bqec {

/// Recovery-gate fidelity linear in the ancilla decoherence rates (T1, T_phi in seconds).
struct GateFidelityLaw {
    double constant = 0.976;
    // Coefficients per inverse microsecond.
    double per_T1 = 0.173;
    double per_T_phi = 0.188;

    double at(double T1, double T_phi) const;
};

/// Scalar fidelity bookkeeping. All fidelities are normalized process fidelities.
struct FidelityModel {
    double C0 = 0.988;
    double C1 = 0.987;
    double F0 = 0.983;
    double F1 = 0.960;
    double F_U1 = 0.969;
    double F_U2 = 0.969;
    double F_U3 = 0.969;
    double F_U4 = 0.969;
    double F_pi = 0.984;
    double n_th_q = 0.008;
    double T1 = 30e-6;
    // Encode and decode each, calibrated so the round trip gives F_chi = 0.931.
    double F_encode = 0.9529;
    double F_decode = 0.9529;
    // Logical gates in the randomized-benchmarking convention 1 - p/2.
    double F_clifford_rb = 0.969;
    double F_T_rb = 0.987;

    static GateFidelityLaw even_recovery_law() { return {0.978, 0.233, 0.181}; }
    static GateFidelityLaw odd_recovery_law() { return {0.976, 0.173, 0.188}; }

    /// Parity fidelities from the linear ancilla model and recovery fidelities from the gate laws.
    static FidelityModel from_device(const DeviceParams& dev, const NoiseParams& noise);
    /// Same model with every recovery gate set to F_U.
    FidelityModel with_recovery(double F_U) const;
    void validate() const;
};

/// Normalized fidelity of each of encode and decode for a given round-trip F_chi.
double encode_fidelity_for_round_trip(double round_trip_chi);

/// One T_w grid point of the intrinsic-error table. Labels are the bit strings of detected
/// parities per step ("0", "1" for one step; "00".."11" for two).
struct IntrinsicPoint {
    double t_w = 0.0;
    int steps = 1;
    // Per-round interval under the two time-axis conventions.
    double T_w_waits = 0.0;
    double T_w_full = 0.0;
    // Joint branch probabilities for the representative input (|0_L> + |1_L>)/sqrt(2).
    std::map<std::string, double> probability;
    // Normalized branch process fidelities.
    std::map<std::string, double> fidelity;

    double p0() const;
    double p00() const;
    double p10() const;
    double F(const std::string& label) const { return fidelity.at(label); }
};

struct IntrinsicErrorTable {
    int steps = 1;
    std::vector<IntrinsicPoint> points;

    /// Linear interpolation in t_w of every entry; throws DomainError outside the grid.
    IntrinsicPoint at(double t_w) const;
};

enum class TimeAxis { kWaitsOnly, kFullDuration };

double thermal_flip_factor(double n_th_q, double T_w, double T1);

/// One-step round fidelity.
double protocol1_model(const FidelityModel& f, const IntrinsicPoint& p, TimeAxis axis = TimeAxis::kWaitsOnly);
/// Two-step round fidelity.
double protocol2_model(const FidelityModel& f, const IntrinsicPoint& p, TimeAxis axis = TimeAxis::kWaitsOnly);
/// N-step generalization with the same composition rules: a clean detection costs F0, an error
/// detection F1 F_pi and an odd recovery, and the last even detection the even recovery.
double nstep_model(const FidelityModel& f, const IntrinsicPoint& p, TimeAxis axis = TimeAxis::kWaitsOnly);

double round_interval(const IntrinsicPoint& p, TimeAxis axis);

/// tau = -T_w / ln F. Throws DomainError unless 0 < F < 1.
double lifetime_from_round_fidelity(double F, double T_w);

}  // namespace bqec
