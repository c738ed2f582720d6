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

#include "bqec/device.hpp"

#include <cmath>
#include <sstream>

#include "bqec/errors.hpp"

namespace bqec {

namespace {

void require_positive(double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        std::ostringstream msg;
        msg << name << " must be positive and finite (got " << v << ")";
        throw ConfigError(msg.str());
    }
}

void require_fraction(double v, double hi, const char* name) {
    if (!(v >= 0.0 && v <= hi)) {
        std::ostringstream msg;
        msg << name << " must lie in [0, " << hi << "] (got " << v << ")";
        throw ConfigError(msg.str());
    }
}

}  // namespace

double NoiseParams::T2() const { return 1.0 / (1.0 / (2.0 * T1) + 1.0 / T_phi); }

void NoiseParams::validate() const {
    if (kappa_s < 0.0) {
        throw ConfigError("kappa_s must be non-negative");
    }
    require_positive(T1, "T1");
    require_positive(T_phi, "T_phi");
    require_fraction(n_th_s, 0.1, "n_th_s");
    require_fraction(n_th_q, 0.1, "n_th_q");
}

void MeasurementModel::validate() const {
    require_fraction(C0, 1.0, "C0");
    require_fraction(C1, 1.0, "C1");
    require_fraction(P_e, 1.0, "P_e");
    require_fraction(P_o, 1.0, "P_o");
    require_fraction(p_d, 0.01, "p_d");
    require_fraction(readout_g, 1.0, "readout_g");
    require_fraction(readout_e, 1.0, "readout_e");
    if (T_BM < 0.0 || T_AM < 0.0 || latency < 0.0) {
        throw ConfigError("measurement window times must be non-negative");
    }
    if (latency > T_AM) {
        throw ConfigError("latency must be contained in T_AM");
    }
}

void DeviceParams::validate() const {
    require_positive(chi_qs, "chi_qs");
    if (K_s < 0.0 || K_s_prime < 0.0) {
        throw ConfigError("Kerr coefficients must be non-negative");
    }
    noise.validate();
    meas.validate();
}

double kerr_energy(const DeviceParams& dev, int n) {
    const double nn = static_cast<double>(n);
    return -0.5 * dev.K_s * nn * (nn - 1.0) - dev.K_s_prime / 6.0 * nn * (nn - 1.0) * (nn - 2.0);
}

double four_photon_frame_rate(const DeviceParams& dev) { return kerr_energy(dev, 4) / 4.0; }

Operator hamiltonian_int(const HilbertConfig& cfg, const DeviceParams& dev, double frame_rate) {
    if (!cfg.include_ancilla) {
        throw DimensionMismatch("hamiltonian_int requires include_ancilla");
    }
    Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    for (int a = 0; a < 2; ++a) {
        for (int n = 0; n <= cfg.n_max; ++n) {
            double e = kerr_energy(dev, n) - frame_rate * n;
            if (a == 1) {
                e -= dev.chi_qs * n;
            }
            H(cfg.index(n, a), cfg.index(n, a)) = e;
        }
    }
    return H;
}

Operator kerr_hamiltonian_matched(const HilbertConfig& cfg, const DeviceParams& dev) {
    const double w = four_photon_frame_rate(dev);
    if (cfg.include_ancilla) {
        return hamiltonian_int(cfg, dev, w);
    }
    Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    for (int n = 0; n <= cfg.n_max; ++n) {
        H(n, n) = kerr_energy(dev, n) - w * n;
    }
    return H;
}

}  // namespace bqec
