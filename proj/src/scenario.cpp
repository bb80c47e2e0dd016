// SPDX-License-Identifier: Apache-2.0

#include "uvaa/scenario.hpp"

#include <algorithm>
#include <cmath>

namespace uvaa {

Position3 SwarmState::centroid() const {
  Position3 c;
  if (uavs.empty()) return c;
  for (const auto &u : uavs) c = c + u.position;
  return c * (1.0 / static_cast<double>(uavs.size()));
}

std::vector<Position3> SwarmState::positions() const {
  std::vector<Position3> out;
  out.reserve(uavs.size());
  for (const auto &u : uavs) out.push_back(u.position);
  return out;
}

double UserState::vx() const { return speed * std::cos(heading); }
double UserState::vy() const { return speed * std::sin(heading); }

GaussMarkovParams gauss_markov_params(const ScenarioConfig &cfg) {
  return {cfg.gm_memory, cfg.gm_mean_speed, cfg.gm_speed_std, cfg.gm_heading_std, cfg.slot_seconds};
}

UserState gmrmm_step(const UserState &user, const Rect &bounds, const GaussMarkovParams &params, Rng &rng) {
  const double mu = params.memory;
  const double innov = std::sqrt(std::max(0.0, 1.0 - mu * mu));
  // Noise is drawn unconditionally so the stream advances identically.
  const double ns = rng.normal();
  const double nh = rng.normal();

  UserState next = user;
  next.speed = mu * user.speed + (1.0 - mu) * params.mean_speed + innov * params.speed_std * ns;
  // mu * h + (1 - mu) * h_mean, taken along the shorter arc between the two.
  next.heading = user.heading + (1.0 - mu) * std::remainder(user.mean_heading - user.heading, kTwoPi) +
                 innov * params.heading_std * nh;

  next.position.x += next.vx() * params.slot_seconds;
  next.position.y += next.vy() * params.slot_seconds;
  next.position.z = 0.0;

  // Reflection: negate the outward component, which for a heading angle means
  // h -> pi - h on an x wall and h -> -h on a y wall.
  auto reflect_x = [](double h) { return kPi - h; };
  auto reflect_y = [](double h) { return -h; };
  if (next.position.x < bounds.x_min || next.position.x > bounds.x_max) {
    next.position.x = std::clamp(next.position.x, bounds.x_min, bounds.x_max);
    next.heading = reflect_x(next.heading);
    next.mean_heading = reflect_x(next.mean_heading);
  }
  if (next.position.y < bounds.y_min || next.position.y > bounds.y_max) {
    next.position.y = std::clamp(next.position.y, bounds.y_min, bounds.y_max);
    next.heading = reflect_y(next.heading);
    next.mean_heading = reflect_y(next.mean_heading);
  }
  next.heading = std::remainder(next.heading, kTwoPi);
  next.mean_heading = std::remainder(next.mean_heading, kTwoPi);
  return next;
}

bool inside_region(const Position3 &p, const ScenarioConfig &cfg) {
  return p.x >= cfg.l_min && p.x <= cfg.l_max && p.y >= cfg.l_min && p.y <= cfg.l_max && p.z >= cfg.h_min &&
         p.z <= cfg.h_max;
}

Position3 users_centroid(const std::vector<UserState> &users) {
  Position3 c;
  if (users.empty()) return c;
  for (const auto &u : users) c = c + u.position;
  return c * (1.0 / static_cast<double>(users.size()));
}

namespace {

std::vector<UserState> place_users(int count, const Rect &rect, Side side, const ScenarioConfig &cfg, Rng &rng) {
  std::vector<UserState> users;
  for (int i = 0; i < count; ++i) {
    UserState u;
    u.position = {rng.uniform(rect.x_min, rect.x_max), rng.uniform(rect.y_min, rect.y_max), 0.0};
    u.speed = cfg.gm_mean_speed;
    u.heading = rng.uniform(-kPi, kPi);
    u.mean_heading = u.heading;
    u.side = side;
    users.push_back(u);
  }
  return users;
}

}  // namespace

Deployment init_deployment(const ScenarioConfig &cfg, Rng &rng) {
  constexpr int kMaxAttempts = 10000;
  Deployment d;
  d.swarm.uavs.reserve(static_cast<std::size_t>(cfg.num_uavs));
  for (int m = 0; m < cfg.num_uavs; ++m) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
      Position3 p{rng.uniform(cfg.l_min, cfg.l_max), rng.uniform(cfg.l_min, cfg.l_max),
                  rng.uniform(cfg.h_min, cfg.h_max)};
      bool ok = true;
      for (const auto &other : d.swarm.uavs) {
        if (distance(p, other.position) < cfg.d_min) {
          ok = false;
          break;
        }
      }
      if (ok) {
        UavState u;
        u.position = p;
        u.excitation = 1.0;
        d.swarm.uavs.push_back(u);
        placed = true;
      }
    }
    if (!placed) {
      throw ConfigError("region.d_min", "cannot place UAV " + std::to_string(m) + " with D_min = " +
                                            std::to_string(cfg.d_min) + " after 10000 attempts (region too small)");
    }
  }
  d.users_k = place_users(cfg.num_users_k, cfg.users_k, Side::same, cfg, rng);
  d.users_j = place_users(cfg.num_users_j, cfg.users_j, Side::opposite, cfg, rng);
  return d;
}

}  // namespace uvaa
