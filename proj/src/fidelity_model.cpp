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

#include "bqec/fidelity_model.hpp"

#include <algorithm>
#include <cmath>

#include "bqec/errors.hpp"
#include "bqec/tomography.hpp"

namespace bqec {

double GateFidelityLaw::at(double T1, double T_phi) const {
    return constant - per_T1 / (T1 / kMicro) - per_T_phi / (T_phi / kMicro);
}

FidelityModel FidelityModel::from_device(const DeviceParams& dev, const NoiseParams& noise) {
    FidelityModel f;
    f.C0 = dev.meas.C0;
    f.C1 = dev.meas.C1;
    const double half_wait = kPi / (2.0 * dev.chi_qs);
    f.F0 = f.C0 - half_wait / noise.T1 - half_wait / noise.T_phi;
    f.F1 = f.C1 - half_wait / noise.T1 - (dev.meas.T_AM + dev.meas.T_BM) / noise.T1 - half_wait / noise.T_phi;
    f.F_U3 = even_recovery_law().at(noise.T1, noise.T_phi);
    f.F_U1 = f.F_U3;
    f.F_U2 = odd_recovery_law().at(noise.T1, noise.T_phi);
    f.F_U4 = f.F_U2;
    f.n_th_q = noise.n_th_q;
    f.T1 = noise.T1;
    return f;
}

FidelityModel FidelityModel::with_recovery(double F_U) const {
    FidelityModel f = *this;
    f.F_U1 = f.F_U2 = f.F_U3 = f.F_U4 = F_U;
    return f;
}

void FidelityModel::validate() const {
    for (double v : {F0, F1, F_U1, F_U2, F_U3, F_U4, F_pi, F_encode, F_decode, F_clifford_rb, F_T_rb}) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw ConfigError("FidelityModel: fidelities must lie in [0, 1]");
        }
    }
    if (!(n_th_q >= 0.0) || !(T1 > 0.0)) {
        throw ConfigError("FidelityModel: need n_th_q >= 0 and T1 > 0");
    }
}

double encode_fidelity_for_round_trip(double round_trip_chi) {
    return std::sqrt(normalize_fidelity(round_trip_chi));
}

double IntrinsicPoint::p0() const {
    double p = 0.0;
    for (const auto& [label, w] : probability) {
        if (label[0] == '0') {
            p += w;
        }
    }
    return p;
}

double IntrinsicPoint::p00() const {
    const double p = p0();
    return p > 0.0 ? probability.at("00") / p : 1.0;
}

double IntrinsicPoint::p10() const {
    const double p = 1.0 - p0();
    return p > 0.0 ? probability.at("10") / p : 1.0;
}

IntrinsicPoint IntrinsicErrorTable::at(double t_w) const {
    if (points.empty()) {
        throw DomainError("IntrinsicErrorTable: empty");
    }
    const double lo = points.front().t_w;
    const double hi = points.back().t_w;
    const double tol = 1e-12 * std::max(1.0, std::abs(hi));
    if (t_w < lo - tol || t_w > hi + tol) {
        throw DomainError("IntrinsicErrorTable: t_w outside the grid");
    }
    std::size_t i = 0;
    while (i + 1 < points.size() && points[i + 1].t_w < t_w) {
        ++i;
    }
    if (i + 1 == points.size() || std::abs(points[i].t_w - t_w) <= tol) {
        return points[i];
    }
    const IntrinsicPoint& a = points[i];
    const IntrinsicPoint& b = points[i + 1];
    const double x = (t_w - a.t_w) / (b.t_w - a.t_w);
    IntrinsicPoint out = a;
    out.t_w = t_w;
    out.T_w_waits = a.T_w_waits + x * (b.T_w_waits - a.T_w_waits);
    out.T_w_full = a.T_w_full + x * (b.T_w_full - a.T_w_full);
    for (auto& [label, v] : out.probability) {
        v += x * (b.probability.at(label) - v);
    }
    for (auto& [label, v] : out.fidelity) {
        v += x * (b.fidelity.at(label) - v);
    }
    return out;
}

double thermal_flip_factor(double n_th_q, double T_w, double T1) { return 1.0 - n_th_q * (1.0 - std::exp(-T_w / T1)); }

double round_interval(const IntrinsicPoint& p, TimeAxis axis) {
    return axis == TimeAxis::kWaitsOnly ? p.T_w_waits : p.T_w_full;
}

double protocol1_model(const FidelityModel& f, const IntrinsicPoint& p, TimeAxis axis) {
    if (p.steps != 1) {
        throw DomainError("protocol1_model: needs a one-step table");
    }
    const double p0 = p.p0();
    const double branches = p0 * p.F("0") * f.F0 * f.F_U1 + (1.0 - p0) * p.F("1") * f.F1 * f.F_U2;
    return branches * thermal_flip_factor(f.n_th_q, round_interval(p, axis), f.T1);
}

double protocol2_model(const FidelityModel& f, const IntrinsicPoint& p, TimeAxis axis) {
    if (p.steps != 2) {
        throw DomainError("protocol2_model: needs a two-step table");
    }
    const double p0 = p.p0();
    const double p00 = p.p00();
    const double p10 = p.p10();
    const double odd2 = f.F1 * f.F_pi * f.F_U2;
    const double odd4 = f.F1 * f.F_pi * f.F_U4;
    const double branches = p0 * p00 * p.F("00") * f.F0 * f.F0 * f.F_U3 +
                            p0 * (1.0 - p00) * p.F("01") * f.F0 * odd4 +
                            (1.0 - p0) * p10 * p.F("10") * odd2 * f.F0 * f.F_U3 +
                            (1.0 - p0) * (1.0 - p10) * p.F("11") * odd2 * odd4;
    return branches * thermal_flip_factor(f.n_th_q, round_interval(p, axis), f.T1);
}

double nstep_model(const FidelityModel& f, const IntrinsicPoint& p, TimeAxis axis) {
    const int n = p.steps;
    double total = 0.0;
    for (const auto& [label, w] : p.probability) {
        if (static_cast<int>(label.size()) != n) {
            throw DomainError("nstep_model: label length differs from the step count");
        }
        double chain = p.F(label);
        for (int k = 0; k < n; ++k) {
            const bool last = (k == n - 1);
            if (label[k] == '0') {
                chain *= f.F0;
                if (last) {
                    chain *= (n == 1) ? f.F_U1 : f.F_U3;
                }
            } else {
                chain *= f.F1 * f.F_pi * (last ? ((n == 1) ? f.F_U2 : f.F_U4) : f.F_U2);
            }
        }
        total += w * chain;
    }
    return total * thermal_flip_factor(f.n_th_q, round_interval(p, axis), f.T1);
}

double lifetime_from_round_fidelity(double F, double T_w) {
    if (!(F > 0.0 && F < 1.0)) {
        throw DomainError("lifetime_from_round_fidelity: need 0 < F < 1");
    }
    return -T_w / std::log(F);
}

}  // namespace bqec
