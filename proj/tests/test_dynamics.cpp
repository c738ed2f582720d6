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
#include <vector>

#include "doctest.h"

#include "bqec/device.hpp"
#include "bqec/dynamics.hpp"
#include "bqec/errors.hpp"

using namespace bqec;

namespace {

constexpr double kTauS = 143e-6;

CollapseSet pure_decay(const HilbertConfig& cfg, double kappa) {
    return {CollapseOp{kappa, destroy(cfg), JumpKind::kPhotonLoss}};
}

}  // namespace

TEST_CASE("RK4 photon decay") {
    const HilbertConfig cfg{6, false};
    const Operator rho0 = fock_ket(cfg, 2) * fock_ket(cfg, 2).adjoint();
    const Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    const QuantumState out = lindblad_evolve(QuantumState::density(rho0), H, pure_decay(cfg, 1.0 / kTauS), kTauS, 20e-9);
    CHECK(std::abs(out.expectation(number(cfg)).real() - 2.0 * std::exp(-1.0)) < 1e-7);
    CHECK_NOTHROW(out.validate());
}

TEST_CASE("RK4 identity evolution") {
    const HilbertConfig cfg{4, true};
    Ket psi = Ket::Random(cfg.dim());
    psi.normalize();
    const QuantumState rho = QuantumState::density(psi * psi.adjoint());
    const QuantumState out = lindblad_evolve(rho, Operator::Zero(cfg.dim(), cfg.dim()), {}, 1e-6, 1e-8);
    CHECK((out.density_entries() - rho.density_entries()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("RK4 coherent-state parity under decay") {
    const HilbertConfig cfg{20, false};
    const double kappa = 1.0 / kTauS;
    const Ket coh = displacement(cfg, std::sqrt(2.0)) * fock_ket(cfg, 0);
    QuantumState rho = QuantumState::density(coh * coh.adjoint());
    const Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    const double step = 10e-6;
    for (int k = 1; k <= 10; ++k) {
        rho = lindblad_evolve(rho, H, pure_decay(cfg, kappa), step, 20e-9);
        const double t = k * step;
        const double expected = std::exp(-2.0 * 2.0 * std::exp(-t * kappa));
        CHECK(std::abs(rho.expectation(parity_op(cfg)).real() - expected) < 1e-3);
    }
}

TEST_CASE("RK4 rejects oversized steps") {
    const HilbertConfig cfg{4, false};
    const Operator rho0 = fock_ket(cfg, 1) * fock_ket(cfg, 1).adjoint();
    const Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    CHECK_THROWS_AS(lindblad_evolve(QuantumState::density(rho0), H, pure_decay(cfg, 1e6), 1e-6, 1e-6), StepSizeTooLarge);
}

TEST_CASE("exact propagator agrees with RK4 and preserves trace and positivity") {
    const HilbertConfig cfg{6, true};
    const DeviceParams dev;
    const Operator H = hamiltonian_int(cfg, dev, four_photon_frame_rate(dev));
    NoiseParams noise;
    const CollapseSet c = make_collapse_set(cfg, noise);
    Ket psi = Ket::Zero(cfg.dim());
    psi(cfg.index(0, 0)) = 0.5;
    psi(cfg.index(4, 0)) = 0.5;
    psi(cfg.index(2, 1)) = std::sqrt(0.5);
    const QuantumState rho = QuantumState::density(psi * psi.adjoint());
    const double t = 2e-6;
    const QuantumState rk = lindblad_evolve(rho, H, c, t, 1e-9);
    const LindbladPropagator prop(H, c, t);
    CHECK(prop.block_count() > 10);
    const Operator ex = prop.apply(rho.density_entries());
    CHECK((rk.density_entries() - ex).cwiseAbs().maxCoeff() < 1e-7);
    CHECK(std::abs(ex.trace() - 1.0) < 1e-10);
    CHECK_NOTHROW(QuantumState::density(ex).validate());
}

TEST_CASE("thermal steady state") {
    const HilbertConfig cfg{8, false};
    NoiseParams noise;
    noise.n_th_s = 0.006;
    const CollapseSet c = make_collapse_set(cfg, noise);
    const Operator rho0 = fock_ket(cfg, 3) * fock_ket(cfg, 3).adjoint();
    const LindbladPropagator prop(Operator::Zero(cfg.dim(), cfg.dim()), c, 20.0 * noise.tau_s());
    const Operator rho = prop.apply(rho0);
    CHECK(std::abs((number(cfg) * rho).trace().real() - noise.n_th_s) < 1e-4);
}

TEST_CASE("no-jump propagator") {
    const HilbertConfig cfg{12, false};
    const double kappa = 1.0 / kTauS;
    const double t = 17.895e-6;
    const Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    CHECK((nojump_propagator(cfg, H, kappa, 0.0) - identity(cfg)).cwiseAbs().maxCoeff() == 0.0);
    const Ket zero_L = (fock_ket(cfg, 0) + fock_ket(cfg, 4)) / std::sqrt(2.0);
    const Ket out = nojump_propagator(cfg, H, kappa, t) * zero_L;
    CHECK(std::abs(out(4) / out(0)) == doctest::Approx(std::exp(-2.0 * kappa * t)).epsilon(1e-12));
    CHECK(std::abs(out(4) / out(0)) == doctest::Approx(0.7786).epsilon(1e-3));
    const Ket two = nojump_propagator(cfg, H, kappa, t) * fock_ket(cfg, 2);
    CHECK(two.squaredNorm() == doctest::Approx(std::exp(-2.0 * kappa * t)).epsilon(1e-12));
    // Semigroup property with a non-trivial Hamiltonian.
    DeviceParams dev;
    const Operator Hk = kerr_hamiltonian_matched(cfg, dev) + 0.01 * dev.K_s * (destroy(cfg) + create(cfg));
    const Operator a = nojump_propagator(cfg, Hk, kappa, 3e-6);
    const Operator b = nojump_propagator(cfg, Hk, kappa, 5e-6);
    const Operator ab = nojump_propagator(cfg, Hk, kappa, 8e-6);
    CHECK((b * a - ab).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("trajectories without rates are Schrodinger evolution") {
    const HilbertConfig cfg{4, true};
    const DeviceParams dev;
    const Operator H = hamiltonian_int(cfg, dev) + 1e6 * ancilla_sigma_x(cfg);
    Ket psi = fock_ket(cfg, 2, 0);
    const TrajectoryRecord rec = trajectory_run(QuantumState::ket(psi), {Segment{H, {}, 1e-6, "idle"}}, 7);
    CHECK(rec.jumps.empty());
    CHECK((rec.final_state - expm(H, 1e-6) * psi).norm() < 1e-9);
}

TEST_CASE("single-photon jump times are exponential") {
    const HilbertConfig cfg{3, false};
    const double kappa = 1.0 / kTauS;
    const JumpEvolver ev(Operator::Zero(cfg.dim(), cfg.dim()), pure_decay(cfg, kappa));
    CHECK(ev.diagonal());
    const int n = 10000;
    std::vector<double> times;
    times.reserve(n);
    const double horizon = 20.0 * kTauS;
    for (int k = 0; k < n; ++k) {
        Rng rng(trajectory_seed(11, k));
        Ket psi = fock_ket(cfg, 1);
        std::vector<JumpRecord> jumps;
        ev.evolve(psi, horizon, rng, &jumps);
        REQUIRE(jumps.size() <= 1);
        times.push_back(jumps.empty() ? horizon : jumps.front().time);
    }
    std::sort(times.begin(), times.end());
    // Kolmogorov-Smirnov distance to 1 - exp(-t/tau).
    double d = 0.0;
    for (int k = 0; k < n; ++k) {
        const double F = 1.0 - std::exp(-times[k] / kTauS);
        d = std::max({d, std::abs(F - static_cast<double>(k) / n), std::abs(F - static_cast<double>(k + 1) / n)});
    }
    CHECK(d < 1.63 / std::sqrt(static_cast<double>(n)));  // 1% critical value
    double mean = 0.0;
    for (double t : times) {
        mean += t;
    }
    mean /= n;
    CHECK(std::abs(mean - kTauS) < 3.0 * kTauS / std::sqrt(static_cast<double>(n)));
}

TEST_CASE("trajectory average matches the master equation") {
    const HilbertConfig cfg{8, true};
    const DeviceParams dev;
    const NoiseParams noise;
    const Operator H = hamiltonian_int(cfg, dev, four_photon_frame_rate(dev));
    const CollapseSet c = make_collapse_set(cfg, noise);
    Ket psi = Ket::Zero(cfg.dim());
    psi(cfg.index(0, 0)) = 0.5;
    psi(cfg.index(4, 0)) = 0.5;
    psi(cfg.index(2, 0)) = cplx(0.0, -std::sqrt(0.5));
    const double t = 17.895e-6;
    const JumpEvolver ev(H, c);
    const int n = 10000;
    Operator avg = Operator::Zero(cfg.dim(), cfg.dim());
    for (int k = 0; k < n; ++k) {
        Rng rng(trajectory_seed(3, k));
        Ket p = psi;
        ev.evolve(p, t, rng);
        avg += p * p.adjoint();
    }
    avg /= n;
    const Operator exact = LindbladPropagator(H, c, t).apply(psi * psi.adjoint());
    CHECK((avg - exact).cwiseAbs().maxCoeff() < 0.02);
}

TEST_CASE("generic stepping path agrees with the diagonal fast path") {
    const HilbertConfig cfg{5, false};
    const double kappa = 1.0 / 20e-6;
    // Identical dynamics; the second generator is made non-diagonal by a zero-rate-free tiny drive.
    const Operator H = Operator::Zero(cfg.dim(), cfg.dim());
    const Operator Hd = 1e-9 * (destroy(cfg) + create(cfg));
    const JumpEvolver fast(H, pure_decay(cfg, kappa));
    const JumpEvolver slow(Hd, pure_decay(cfg, kappa), 0.5e-6);
    CHECK(fast.diagonal());
    CHECK(!slow.diagonal());
    const int n = 3000;
    double n_fast = 0.0;
    double n_slow = 0.0;
    for (int k = 0; k < n; ++k) {
        Rng r1(trajectory_seed(5, k));
        Rng r2(trajectory_seed(6, k));
        Ket a = fock_ket(cfg, 3);
        Ket b = fock_ket(cfg, 3);
        fast.evolve(a, 20e-6, r1);
        slow.evolve(b, 20e-6, r2);
        n_fast += a.dot(number(cfg) * a).real();
        n_slow += b.dot(number(cfg) * b).real();
    }
    const double expected = 3.0 * std::exp(-1.0);
    CHECK(std::abs(n_fast / n - expected) < 0.05);
    CHECK(std::abs(n_slow / n - expected) < 0.05);
}

TEST_CASE("trajectory seeds are order independent") {
    CHECK(trajectory_seed(1, 2) == trajectory_seed(1, 2));
    CHECK(trajectory_seed(1, 2) != trajectory_seed(2, 1));
    CHECK(trajectory_seed(1, 2) != trajectory_seed(1, 3));
}

TEST_CASE("trajectory schedule records events") {
    const HilbertConfig cfg{4, false};
    std::vector<ScheduleItem> schedule;
    schedule.push_back(Segment{Operator::Zero(cfg.dim(), cfg.dim()), pure_decay(cfg, 1.0 / kTauS), 10e-6, "wait"});
    schedule.push_back(Event{"parity", [&](Ket& psi, Rng&) { return parity_op(cfg).diagonal().dot(psi.cwiseAbs2().cast<cplx>()).real() < 0 ? 1 : 0; }});
    const TrajectoryRecord a = trajectory_run(QuantumState::ket(fock_ket(cfg, 2)), schedule, 99);
    const TrajectoryRecord b = trajectory_run(QuantumState::ket(fock_ket(cfg, 2)), schedule, 99);
    REQUIRE(a.outcomes.size() == 1);
    CHECK(a.outcomes[0].second == b.outcomes[0].second);
    CHECK(a.outcomes[0].second == static_cast<int>(a.jumps.size() % 2));
}
