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

#include "bqec/fock.hpp"

namespace bqec {

// Frequencies below are angular (rad/s); times are seconds.
inline constexpr double kMicro = 1e-6;
inline constexpr double kNano = 1e-9;

inline constexpr double angular_from_hz(double f_hz) { return kTwoPi * f_hz; }
inline constexpr double hz_from_angular(double w) { return w / kTwoPi; }

struct NoiseParams {
    double kappa_s = 1.0 / (143.0 * kMicro);
    double n_th_s = 0.006;
    double T1 = 30.0 * kMicro;
    double T_phi = 120.0 * kMicro;
    double n_th_q = 0.008;

    double tau_s() const { return 1.0 / kappa_s; }
    // Ancilla up-rate n_th_q / T1.
    double gamma_up() const { return n_th_q / T1; }
    // 1/T2 = 1/(2 T1) + 1/T_phi
    double T2() const;
    void validate() const;
};

struct MeasurementModel {
    double C0 = 0.988;
    double C1 = 0.987;
    double P_e = 0.983;
    double P_o = 0.960;
    double p_d = 0.0008;
    double T_BM = 160.0 * kNano;
    double T_AM = 496.0 * kNano;
    double latency = 336.0 * kNano;
    double readout_g = 0.999;
    double readout_e = 0.989;

    void validate() const;
};

struct DeviceParams {
    double chi_qs = angular_from_hz(1.90e6);
    double chi_qr = angular_from_hz(3.65e6);
    double chi_sr = angular_from_hz(15.6e3);
    double K_q = angular_from_hz(232e6);
    double K_r = angular_from_hz(14.4e3);
    double K_s = angular_from_hz(4.23e3);
    double K_s_prime = angular_from_hz(0.45e3);
    double omega_q = angular_from_hz(5.692e9);
    double omega_s = angular_from_hz(7.634e9);
    double omega_r = angular_from_hz(8.610e9);
    NoiseParams noise;
    MeasurementModel meas;

    // Duration of the conditional-phase wait pi / chi_qs.
    double parity_wait() const { return kPi / chi_qs; }
    void validate() const;
};

// Oscillator eigenenergy of |n> with the ancilla in |g> (rotating frame at omega_s).
double kerr_energy(const DeviceParams& dev, int n);
// Frame rate at which |0> and |4> are degenerate: E_4 / 4.
double four_photon_frame_rate(const DeviceParams& dev);

// -chi n |e><e| - K/2 a^2+ a^2 - K'/6 a^3+ a^3 - frame_rate * n.
// Requires include_ancilla.
Operator hamiltonian_int(const HilbertConfig& cfg, const DeviceParams& dev, double frame_rate = 0.0);

// Kerr-only Hamiltonian in the four-photon-matched frame; with an ancilla the
// dispersive term is included as well.
Operator kerr_hamiltonian_matched(const HilbertConfig& cfg, const DeviceParams& dev);

}  // namespace bqec
