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

#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"

#include "bqec/code.hpp"
#include "bqec/errors.hpp"
#include "bqec/syndrome.hpp"

using namespace bqec;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

MeasurementModel perfect_model() {
    MeasurementModel m;
    m.P_e = m.P_o = 1.0;
    m.C0 = m.C1 = 1.0;
    m.p_d = 0.0;
    return m;
}

double odd_probability(const std::array<Operator, 2>& b) { return b[1].trace().real(); }

}  // namespace

TEST_CASE("linear parity fidelity model") {
    const DeviceParams dev;
    const ParityFidelities f = parity_fidelity_model(dev, dev.noise);
    CHECK(std::abs(f.F0 - 0.983) < 1e-3);
    CHECK(std::abs(f.F1 - 0.960) < 1e-3);
    const ParityFidelities ideal = parity_fidelity_model(0.988, 0.987, dev.chi_qs, kInf, kInf, 160e-9, 496e-9);
    CHECK(ideal.F0 == 0.988);
    CHECK(ideal.F1 == 0.987);
    // Average at mean photon number two.
    CHECK(std::abs(0.5 * (dev.meas.P_e + dev.meas.P_o) - 0.972) < 1e-3);
}

TEST_CASE("perfect scalar measurement leaves the code word unchanged") {
    const HilbertConfig cfg{8, true};
    const DeviceParams dev;
    const ParityMeter meter(cfg, dev, dev.noise, perfect_model());
    const CodeWords c = binomial_code(cfg.oscillator_only());
    Rng rng(3);
    for (int k = 0; k < 20; ++k) {
        Ket psi = embed_ket(cfg, c.zero_L, 0);
        CHECK(meter.measure(psi, rng, MeasureMode::kScalar) == 0);
        CHECK((psi - embed_ket(cfg, c.zero_L, 0)).norm() < 1e-12);
        Ket err = embed_ket(cfg, fock_ket(cfg.oscillator_only(), 3), 0);
        CHECK(meter.measure(err, rng, MeasureMode::kScalar) == 1);
        CHECK(std::abs(err(cfg.index(3, 1))) == doctest::Approx(1.0));
    }
    // An excited ancilla inverts the reported bit.
    Ket flipped = embed_ket(cfg, c.zero_L, 1);
    CHECK(meter.measure(flipped, rng, MeasureMode::kScalar) == 1);
}

TEST_CASE("microscopic Ramsey maps parity exactly without decoherence") {
    const HilbertConfig cfg{8, true};
    const DeviceParams dev;
    NoiseParams quiet;
    quiet.kappa_s = 0.0;
    quiet.T1 = kInf;
    quiet.T_phi = kInf;
    quiet.n_th_q = 0.0;
    const ParityMeter meter(cfg, dev, quiet, perfect_model());
    for (int n = 0; n <= 6; ++n) {
        const Ket in = fock_ket(cfg, n);
        const auto b = meter.measure(Operator(in * in.adjoint()), MeasureMode::kMicroscopic);
        CHECK(std::abs(odd_probability(b) - (n % 2)) < 1e-12);
        Rng rng(n);
        Ket psi = in;
        CHECK(meter.measure(psi, rng, MeasureMode::kMicroscopic) == n % 2);
    }
}

TEST_CASE("scalar density branches") {
    const HilbertConfig cfg{8, true};
    const DeviceParams dev;
    const ParityMeter meter(cfg, dev, dev.noise, dev.meas);
    const Ket in = (fock_ket(cfg, 2) + fock_ket(cfg, 3)) / std::sqrt(2.0);
    const auto b = meter.measure(Operator(in * in.adjoint()), MeasureMode::kScalar);
    const double p_odd = 0.5 * dev.meas.P_o + 0.5 * (1.0 - dev.meas.P_e);
    CHECK(odd_probability(b) == doctest::Approx(p_odd).epsilon(1e-12));
    CHECK((b[0] + b[1]).trace().real() == doctest::Approx(1.0).epsilon(1e-12));
    // The reported bit is stored in the ancilla.
    CHECK((ancilla_projector(cfg, 1) * b[1]).trace().real() == doctest::Approx(p_odd).epsilon(1e-12));
}

TEST_CASE("demolition") {
    const HilbertConfig osc{10, false};
    const auto kraus = amplitude_damping_kraus(osc, 0.1);
    Operator sum = Operator::Zero(osc.dim(), osc.dim());
    for (const Operator& k : kraus) {
        sum += k.adjoint() * k;
    }
    CHECK((sum - identity(osc)).cwiseAbs().maxCoeff() < 1e-12);
    // <n> shrinks by 1 - gamma.
    const Ket in = fock_ket(osc, 4);
    double n = 0;
    for (const Operator& k : kraus) {
        const Ket out = k * in;
        n += (out.adjoint() * number(osc) * out)(0).real();
    }
    CHECK(n == doctest::Approx(3.6).epsilon(1e-12));
}

TEST_CASE("scalar and microscopic modes agree") {
    const HilbertConfig cfg{8, true};
    const DeviceParams dev;
    // The scalar model covers the ancilla chain; oscillator loss in the window is simulated separately.
    NoiseParams noise = dev.noise;
    noise.kappa_s = 0.0;
    const ParityMeter meter(cfg, dev, noise, dev.meas);
    const CodeWords c = binomial_code(cfg.oscillator_only());
    const Ket inputs[] = {embed_ket(cfg, c.zero_L, 0), embed_ket(cfg, c.one_L, 0),
                          embed_ket(cfg, fock_ket(cfg.oscillator_only(), 3), 0),
                          embed_ket(cfg, fock_ket(cfg.oscillator_only(), 1), 0)};
    const int parity[] = {0, 0, 1, 1};
    for (int i = 0; i < 4; ++i) {
        const Operator rho = inputs[i] * inputs[i].adjoint();
        const auto s = meter.measure(rho, MeasureMode::kScalar);
        const auto m = meter.measure(rho, MeasureMode::kMicroscopic);
        // Correct syndrome with the ancilla still holding it at the end of the window.
        const int r = parity[i];
        const double ps = (ancilla_projector(cfg, r) * s[r]).trace().real();
        const double pm = (ancilla_projector(cfg, r) * m[r]).trace().real();
        CHECK(std::abs(ps - pm) < 0.005);
    }
}

TEST_CASE("linear model tracks the microscopic sequence") {
    const HilbertConfig cfg{8, true};
    const DeviceParams dev;
    for (double T1 : {20e-6, 30e-6, 60e-6, 120e-6}) {
        NoiseParams noise = dev.noise;
        noise.T1 = T1;
        const ParityFidelities lin = parity_fidelity_model(dev, noise);
        const ParityFidelities mic = microscopic_parity_fidelities(cfg, dev, noise, dev.meas);
        CHECK(std::abs(lin.F0 - mic.F0) < 0.005);
        CHECK(std::abs(lin.F1 - mic.F1) < 0.005);
    }
}

TEST_CASE("monitored parity decay") {
    const double tau_tot = 1.0 / (1.0 / 143e-6 + 0.0008 / 2e-6);
    CHECK(tau_tot == doctest::Approx(135.3e-6).epsilon(1e-3));
    // Saturation is alpha independent.
    const MeasurementModel m;
    const double sat = qnd_parity_model(1.0, 2.0, 1e-6, 0.0, m.P_e, m.P_o);
    CHECK(sat == doctest::Approx(2.0 * m.P_e - 1.0).epsilon(1e-12));
    CHECK(sat == doctest::Approx(qnd_parity_model(1.0, 5.0, 1e-6, 0.0, m.P_e, m.P_o)));
    NoiseParams noise;
    const QndCurve c = qnd_parity_decay(cplx(std::sqrt(2.0), 0.0), 2e-6, m, noise, 600e-6);
    CHECK(c.tau_tot == doctest::Approx(tau_tot).epsilon(0.01));
    CHECK(c.n_th == doctest::Approx(noise.n_th_s).epsilon(0.3));
    CHECK_THROWS_AS(qnd_parity_decay(0.0, 2e-6, m, noise, 600e-6), DomainError);
}

TEST_CASE("demolition probability from a synthetic sweep") {
    const MeasurementModel m;
    const NoiseParams noise;
    const std::vector<double> reps{1e-6, 2e-6, 5e-6, 10e-6, 30e-6};
    const QndCalibration exact = qnd_calibrate(cplx(std::sqrt(2.0), 0.0), reps, m, noise, 600e-6);
    CHECK(exact.p_d == doctest::Approx(0.0008).epsilon(0.05));
    CHECK(exact.tau_s == doctest::Approx(143e-6).epsilon(0.02));
    std::vector<double> found;
    for (int seed = 0; seed < 20; ++seed) {
        QndOptions opts;
        opts.shots = 20000;
        opts.seed = seed + 1;
        found.push_back(qnd_calibrate(cplx(std::sqrt(2.0), 0.0), reps, m, noise, 600e-6, opts).p_d);
    }
    std::nth_element(found.begin(), found.begin() + 10, found.end());
    MESSAGE("median p_d " << found[10]);
    CHECK(found[10] == doctest::Approx(0.0008).epsilon(0.10));
}
