// SPDX-License-Identifier: Apache-2.0
//
// World geometry, UAV kinematic state and ground-user mobility.

#pragma once

#include <vector>

#include "uvaa/config.hpp"
#include "uvaa/rng.hpp"
#include "uvaa/types.hpp"

namespace uvaa {

struct UavState {
  Position3 position;
  double speed = 0.0;           // horizontal, m/s
  double heading = 0.0;         // rad
  double vertical_speed = 0.0;  // m/s
  double excitation = 1.0;      // in [0, 1]
  double prev_mean_speed = 0.0;
};

struct SwarmState {
  std::vector<UavState> uavs;

  std::size_t size() const { return uavs.size(); }
  // Reference point of the virtual array.
  Position3 centroid() const;
  std::vector<Position3> positions() const;
};

enum class Side { same, opposite };

// Gauss-Markov user: speed and heading evolve as first-order AR processes
// around their means; the ground velocity is speed * (cos h, sin h).
struct UserState {
  Position3 position;
  double speed = 0.0;
  double heading = 0.0;
  double mean_heading = 0.0;
  Side side = Side::same;

  double vx() const;
  double vy() const;
};

struct GaussMarkovParams {
  double memory = 0.8;
  double mean_speed = 1.0;
  double speed_std = 0.3;
  double heading_std = 0.1;
  double slot_seconds = 1.0;
};

GaussMarkovParams gauss_markov_params(const ScenarioConfig &cfg);

// One mobility step; the position is clipped to `bounds` and the velocity
// component normal to a violated wall is reflected (mean heading included).
UserState gmrmm_step(const UserState &user, const Rect &bounds, const GaussMarkovParams &params, Rng &rng);

struct Deployment {
  SwarmState swarm;
  std::vector<UserState> users_k;
  std::vector<UserState> users_j;
};

// Uniform placement with rejection sampling for the minimum separation;
// throws ConfigError after 10,000 failed attempts for a single UAV.
Deployment init_deployment(const ScenarioConfig &cfg, Rng &rng);

bool inside_region(const Position3 &p, const ScenarioConfig &cfg);

Position3 users_centroid(const std::vector<UserState> &users);

}  // namespace uvaa
