// SPDX-License-Identifier: Apache-2.0
//
// The multi-agent MDP: observation layout, action application, constraint
// flags, shaped rewards and the per-slot system objective.

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "uvaa/channel.hpp"
#include "uvaa/config.hpp"
#include "uvaa/rng.hpp"
#include "uvaa/scenario.hpp"
#include "uvaa/star_ris.hpp"

namespace uvaa {

inline constexpr int kActionDim = 4;

// Per-UAV control for one slot.
struct UavAction {
  double excitation = 1.0;      // I in [0, 1]
  double speed = 0.0;           // horizontal, [v_min, v_max]
  double heading = 0.0;         // [-pi, pi]
  double vertical_speed = 0.0;  // [omega_min, omega_max]
};

struct ActionBounds {
  std::array<double, kActionDim> lo;
  std::array<double, kActionDim> hi;
};

// Component order matches UavAction: excitation, speed, heading, vertical.
ActionBounds action_bounds(const ScenarioConfig &cfg);
bool within_bounds(const UavAction &a, const ActionBounds &b);
std::array<double, kActionDim> to_array(const UavAction &a);
UavAction from_array(const std::array<double, kActionDim> &v);

// Layout: UAV (x, y, z) for m = 0..N_M-1, then (x, y) of every K user, then
// (x, y) of every J user. Raw metres.
std::size_t observation_size(const ScenarioConfig &cfg);
std::vector<double> observation(const Deployment &d);

// eps + (1 - eps) * min(t / t_max, 1).
double penalty_weight(int t, int t_max, double epsilon);

// lambda1 * R - lambda2 * E.
double objective(double rate, double energy, double lambda1, double lambda2);

// Cosine of the angle between q and z; 0 when either is the zero vector.
double cosine_similarity(const Position3 &q, const Position3 &z);

struct ConstraintFlags {
  std::vector<int> out_of_box;              // O^1 per UAV
  std::vector<std::vector<int>> too_close;  // C^2 per ordered pair, symmetric, zero diagonal
  bool rate_floor_k = false;                // true when the floor is violated
  bool rate_floor_j = false;

  int collisions_of(std::size_t m) const;
  bool feasible(std::size_t m) const { return out_of_box[m] == 0 && collisions_of(m) == 0; }
};

// Box membership is closed; pair distance is 3D Euclidean.
ConstraintFlags constraint_check(const SwarmState &swarm, const ScenarioConfig &cfg, double rate_k, double rate_j);

struct SlotMetrics {
  double rate_bps = 0.0;
  double rate_k_bps = 0.0;
  double rate_j_bps = 0.0;
  double gain_k = 0.0;
  double gain_j = 0.0;
  double pattern = 0.0;
  double ris_metric = 0.0;
  std::vector<double> energy_j;  // per UAV
  double total_energy_j = 0.0;
  double objective = 0.0;        // lambda1 R[Mbit/s] - lambda2 E_total
  ConstraintFlags flags;
  int boundary_violations = 0;
  int collision_violations = 0;  // unordered pairs
};

// Reward for agent m. `before` and `after` are the UAV positions around the
// kinematic update, `t` the 0-based slot index.
double agent_reward(std::size_t m, const SlotMetrics &metrics, const Position3 &before, const Position3 &after,
                    const Position3 &ris_position, const Position3 &reference, const RewardParams &params, int t,
                    int t_max);

struct StepOutcome {
  std::vector<double> observation;
  std::vector<double> rewards;
  SlotMetrics metrics;
  bool done = false;
};

using RisController = std::function<StarRisState(const ChannelRealization &, const StarRisState &, Rng &)>;

// ATSO with the config's annealing parameters.
RisController atso_controller(const AnnealConfig &cfg);

class Environment {
 public:
  // `cfg` must be finalized.
  Environment(const SimConfig &cfg, std::uint64_t seed);

  // New deployment and fresh RIS state. Without a seed the substreams simply
  // continue, so successive episodes differ.
  std::vector<double> reset(std::optional<std::uint64_t> seed = std::nullopt);

  StepOutcome step(const std::vector<UavAction> &actions);
  StepOutcome step(const std::vector<UavAction> &actions, const RisController &controller);

  const SimConfig &config() const { return cfg_; }
  const Deployment &deployment() const { return deploy_; }
  const StarRisState &ris() const { return ris_; }
  const ChannelRealization &last_channel() const { return chan_; }
  int slot() const { return slot_; }
  bool done() const { return slot_ >= cfg_.scenario.slots_per_episode; }
  std::size_t num_agents() const { return static_cast<std::size_t>(cfg_.scenario.num_uavs); }
  RngStreams &streams() { return rng_; }

 private:
  SimConfig cfg_;
  RngStreams rng_;
  Deployment deploy_;
  StarRisState ris_;
  ChannelRealization chan_;
  RisController atso_;
  Position3 reference_;
  int slot_ = 0;
};

}  // namespace uvaa
