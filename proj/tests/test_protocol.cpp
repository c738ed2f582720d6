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

#include <cmath>

#include "doctest.h"

#include "bqec/errors.hpp"
#include "bqec/protocol.hpp"

using namespace bqec;

namespace {

NoiseParams quiet_noise() {
    NoiseParams n;
    n.kappa_s = 0.0;
    n.n_th_s = 0.0;
    n.n_th_q = 0.0;
    n.T1 = 1e3;
    n.T_phi = 1e3;
    return n;
}

}  // namespace

TEST_CASE("noiseless rounds preserve the logical state") {
    DeviceParams dev;
    ProtocolConfig pc;
    pc.n_rounds = 2;
    pc.sources = ErrorSources::intrinsic_only();
    pc.sources.cavity_loss = false;
    pc.sources.kerr = false;
    const QecResult r = run_qec(pc, dev, dev.noise, FidelityModel{});
    REQUIRE(r.fidelity.size() == 3);
    for (double F : r.fidelity) {
        CHECK(F == doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("Kerr alone is fully undone by the recovery schedule") {
    DeviceParams dev;
    ProtocolConfig pc;
    pc.n_rounds = 2;
    pc.sources = ErrorSources::intrinsic_only();
    pc.sources.cavity_loss = false;
    const QecResult r = run_qec(pc, dev, dev.noise, FidelityModel{});
    CHECK(r.fidelity.back() == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("branch probabilities form a distribution") {
    DeviceParams dev;
    ProtocolConfig pc;
    const QecResult r = run_qec(pc, dev, dev.noise, FidelityModel::from_device(dev, dev.noise));
    for (const auto* branches : {&r.reported_branches, &r.true_branches}) {
        REQUIRE(branches->size() == 4);
        double total = 0.0;
        double total_rep = 0.0;
        for (const auto& [label, b] : *branches) {
            CHECK(label.size() == 2);
            total += b.probability;
            total_rep += b.probability_representative;
            CHECK(b.chi.trace() == doctest::Approx(1.0).epsilon(1e-9));
        }
        // Demolition and ancilla decay do not leak trace.
        CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(total_rep == doctest::Approx(1.0).epsilon(1e-9));
    }
    // Round trip through encode and decode alone; the stored encode fidelity has four digits.
    CHECK(r.fidelity[0] == doctest::Approx(0.931).epsilon(1e-4));
}

TEST_CASE("scalar model tracks the density-matrix engine") {
    DeviceParams dev;
    const FidelityModel fm = FidelityModel::from_device(dev, dev.noise);
    ProtocolConfig pc;
    pc.n_rounds = 2;
    const QecResult dm = run_qec(pc, dev, dev.noise, fm);
    pc.mode = EngineMode::kScalarModel;
    const QecResult sc = run_qec(pc, dev, dev.noise, fm);
    for (int n = 0; n <= 2; ++n) {
        CHECK(std::abs(dm.fidelity[n] - sc.fidelity[n]) < 0.01);
    }
}

TEST_CASE("trajectories reproduce the density matrix and are reproducible") {
    DeviceParams dev;
    const FidelityModel fm = FidelityModel::from_device(dev, dev.noise);
    ProtocolConfig pc;
    pc.mode = EngineMode::kTrajectory;
    pc.trajectories = 600;
    pc.threads = 1;
    const QecResult a = run_qec(pc, dev, dev.noise, fm);
    pc.threads = 3;
    const QecResult b = run_qec(pc, dev, dev.noise, fm);
    REQUIRE(a.fidelity.size() == b.fidelity.size());
    for (std::size_t n = 0; n < a.fidelity.size(); ++n) {
        CHECK(a.fidelity[n] == b.fidelity[n]);
    }
    CHECK(a.outcome_counts == b.outcome_counts);
    CHECK(a.trajectories == 2400);
    CHECK(a.records.size() == static_cast<std::size_t>(pc.record_limit));

    pc.mode = EngineMode::kDensityMatrix;
    const QecResult dm = run_qec(pc, dev, dev.noise, fm);
    // Binomial spread of a 600-sample mean is about 0.015.
    CHECK(std::abs(a.fidelity[1] - dm.fidelity[1]) < 0.05);
}

TEST_CASE("trajectory records follow the gate schedule") {
    DeviceParams dev;
    ProtocolConfig pc;
    pc.n_rounds = 3;
    std::vector<RoundRecord> records;
    run_qec_state(Eigen::Vector2cd(1, 0), pc, dev, dev.noise, FidelityModel::from_device(dev, dev.noise), &records);
    REQUIRE(records.size() == 3);
    for (const RoundRecord& r : records) {
        REQUIRE(r.outcomes.size() == 2);
        CHECK(r.gates[0] == (r.outcomes[0] == 1 ? "U2" : "none"));
        CHECK(r.gates[1] == (r.outcomes[1] == 1 ? "U4" : "U3"));
    }
    CHECK(records[2].elapsed > records[1].elapsed);
}

TEST_CASE("invalid configurations") {
    DeviceParams dev;
    ProtocolConfig pc;
    pc.steps_per_round = 0;
    CHECK_THROWS_AS(run_qec(pc, dev, dev.noise, FidelityModel{}), ConfigError);
    pc = ProtocolConfig{};
    pc.n_max = 3;
    CHECK_THROWS_AS(run_qec(pc, dev, dev.noise, FidelityModel{}), ConfigError);
    pc = ProtocolConfig{};
    CHECK_THROWS_AS(QecEngine(pc, dev, dev.noise, FidelityModel{}).run_state(Eigen::Vector2cd(1, 0), 0), ConfigError);
}

TEST_CASE("transmon baseline matches the closed form") {
    NoiseParams n;
    n.n_th_q = 0.0;
    const DecayCurve c = run_uncorrected(Encoding::kTransmon, DeviceParams{}, n);
    for (std::size_t i = 0; i < c.time.size(); ++i) {
        CHECK(c.fidelity[i] == doctest::Approx(transmon_process_fidelity(n, c.time[i])).epsilon(1e-9));
    }
}

TEST_CASE("Fock baseline matches amplitude damping") {
    NoiseParams n = quiet_noise();
    n.kappa_s = 1.0 / 143e-6;
    const DecayCurve c = run_uncorrected(Encoding::kFock01, DeviceParams{}, n);
    for (std::size_t i = 0; i < c.time.size(); ++i) {
        const double g = std::exp(-n.kappa_s * c.time[i]);
        CHECK(c.fidelity[i] == doctest::Approx(0.25 * (1.0 + g + 2.0 * std::sqrt(g))).epsilon(1e-9));
    }
}

TEST_CASE("binomial baseline is Kerr-free at four-photon periods") {
    DeviceParams dev;
    const DecayCurve c = run_uncorrected(Encoding::kBinomial, dev, quiet_noise(), {12, 20e-6, 6});
    CHECK(c.time[1] == doctest::Approx(four_photon_kerr_period(dev)));
    for (double F : c.fidelity) {
        CHECK(F == doctest::Approx(1.0).epsilon(1e-8));
    }
}

TEST_CASE("Ramsey fringes") {
    DeviceParams dev;
    const FidelityModel fm = FidelityModel::from_device(dev, dev.noise);
    ProtocolConfig pc;
    RamseyOptions opts;
    opts.points = 16;
    opts.unprotected_points = 30;
    const RamseyResult free = ramsey_logical(false, dev, dev.noise, pc, fm, opts);
    // In the four-photon frame the |2> level carries the residual Kerr frequency.
    const double residual = (kerr_energy(dev, 2) - 2.0 * four_photon_frame_rate(dev)) / kTwoPi;
    CHECK(free.fringe_frequency == doctest::Approx(std::abs(residual)).epsilon(0.02));
    const RamseyResult prot = ramsey_logical(true, dev, dev.noise, pc, fm, opts);
    CHECK(prot.fringe_frequency == doctest::Approx(opts.detuning_hz).epsilon(0.02));
    CHECK(prot.coherence_time > free.coherence_time);
    for (double c : prot.contrast) {
        CHECK(c <= 1.0 + 1e-9);
    }
}

TEST_CASE("randomized benchmarking recovers the injected depolarization") {
    DeviceParams dev;
    RbOptions opts;
    opts.sequences = 20;
    const RbResult r = randomized_benchmarking(dev, dev.noise, FidelityModel{}, opts);
    CHECK(r.p == doctest::Approx(0.938).epsilon(1e-6));
    CHECK(r.r_gate == doctest::Approx(0.031).epsilon(1e-5));
    // Interleaving the identity doubles the noise per step.
    opts.interleaved = clifford_index(Qubit2::Identity());
    const RbResult i = randomized_benchmarking(dev, dev.noise, FidelityModel{}, opts);
    CHECK(i.p / r.p == doctest::Approx(0.938).epsilon(1e-6));
    opts.interleaved = 99;
    CHECK_THROWS_AS(randomized_benchmarking(dev, dev.noise, FidelityModel{}, opts), ConfigError);
}

TEST_CASE("T-gate repetition") {
    DeviceParams dev;
    const TGateResult r = t_gate_repetition({0, 2, 4, 8, 12, 16}, dev, dev.noise, FidelityModel{});
    CHECK(r.per_gate_decay == doctest::Approx(0.974).epsilon(1e-6));
    CHECK(r.gate_fidelity_rb == doctest::Approx(0.987).epsilon(1e-6));
    CHECK(r.intercept == doctest::Approx(0.931).epsilon(1e-4));
    CHECK(r.fidelity[0] == doctest::Approx(r.intercept).epsilon(1e-4));
}
