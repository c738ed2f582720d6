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
#include <functional>
#include <random>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bqec/device.hpp"
#include "bqec/fock.hpp"

namespace bqec {

enum class JumpKind {
    kPhotonLoss,
    kPhotonGain,
    kAncillaDecay,
    kAncillaExcitation,
    kAncillaDephasing,
    kCustom,
};

std::string_view to_string(JumpKind kind);

// Jump operator sqrt(rate) * op.
struct CollapseOp {
    double rate = 0.0;
    Operator op;
    JumpKind kind = JumpKind::kCustom;

    Operator jump() const { return std::sqrt(rate) * op; }
};

using CollapseSet = std::vector<CollapseOp>;

struct CollapseOptions {
    bool photon_loss = true;
    bool photon_gain = true;
    bool ancilla_decay = true;
    bool ancilla_excitation = true;
    bool ancilla_dephasing = true;
};

// Thermal oscillator pair kappa(1+n_th) a, kappa n_th a^dagger; with an ancilla also
// 1/T1 sigma_-, n_th_q/T1 sigma_+, and 1/(2 T_phi) sigma_z. Zero-rate terms are omitted.
CollapseSet make_collapse_set(const HilbertConfig& cfg, const NoiseParams& noise, const CollapseOptions& opts = {});

Operator lindblad_rhs(const Operator& rho, const Operator& H, const CollapseSet& c);

// Fixed-step RK4 integration of the master equation. Requires dt * max_rate <= 0.01.
QuantumState lindblad_evolve(const QuantumState& rho, const Operator& H, const CollapseSet& c, double t, double dt);

// Column-stacked Liouvillian: vec(d rho / dt) = L vec(rho).
Operator liouvillian(const Operator& H, const CollapseSet& c);

// Exact exp(L t). The Liouvillian is split into the connected components of its
// sparsity graph, each exponentiated densely; diagonal Hamiltonians with ladder-type
// jumps decompose into sectors of fixed photon-number difference.
class LindbladPropagator {
  public:
    LindbladPropagator() = default;
    LindbladPropagator(const Operator& H, const CollapseSet& c, double t);

    int dim() const { return dim_; }
    double duration() const { return t_; }
    Operator apply(const Operator& rho) const;
    std::size_t block_count() const { return blocks_.size(); }

  private:
    struct Block {
        std::vector<int> index;
        Operator map;
    };
    int dim_ = 0;
    double t_ = 0.0;
    std::vector<Block> blocks_;
};

// H - i/2 sum_k L_k^dagger L_k
Operator effective_hamiltonian(const Operator& H, const CollapseSet& c);

// exp(-i H t - (kappa/2) n t) with n the oscillator number operator of cfg.
Operator nojump_propagator(const HilbertConfig& cfg, const Operator& H, double kappa_s, double t);

// splitmix64-style mixing of (master seed, index).
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

using Rng = std::mt19937_64;

struct JumpRecord {
    double time = 0.0;
    JumpKind kind = JumpKind::kCustom;
    int channel = 0;
};

// Precomputed no-jump generator for one (H, c) pair. Diagonal effective
// Hamiltonians use closed-form propagation and root-finding for jump times.
class JumpEvolver {
  public:
    JumpEvolver() = default;
    JumpEvolver(const Operator& H, const CollapseSet& c, double max_step = 20e-9);

    // Advance psi (normalized) by duration with stochastic jumps. Jump times are
    // recorded relative to t0.
    void evolve(Ket& psi, double duration, Rng& rng, std::vector<JumpRecord>* jumps = nullptr, double t0 = 0.0) const;
    bool diagonal() const { return diagonal_; }
    int dim() const { return dim_; }

  private:
    Ket nojump(const Ket& psi, double t) const;
    void jump(Ket& psi, Rng& rng, std::vector<JumpRecord>* jumps, double time) const;

    int dim_ = 0;
    bool diagonal_ = false;
    double max_step_ = 20e-9;
    Eigen::VectorXcd diag_;  // -i h_k for diagonal H_eff
    Operator heff_;
    CollapseSet c_;
    std::vector<Operator> jumps_;
};

struct Segment {
    Operator H;
    CollapseSet c;
    double duration = 0.0;
    std::string label;
};

// Instantaneous event acting on the ket; the returned integer is stored as its outcome.
struct Event {
    std::string label;
    std::function<int(Ket&, Rng&)> apply;
};

using ScheduleItem = std::variant<Segment, Event>;

struct TrajectoryRecord {
    Ket final_state;
    std::vector<JumpRecord> jumps;
    std::vector<std::pair<std::string, int>> outcomes;
};

TrajectoryRecord trajectory_run(const QuantumState& psi, const std::vector<ScheduleItem>& schedule, std::uint64_t seed);

}  // namespace bqec
