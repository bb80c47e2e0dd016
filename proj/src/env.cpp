// SPDX-License-Identifier: Apache-2.0

#include "uvaa/env.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "uvaa/energy.hpp"

namespace uvaa {

ActionBounds action_bounds(const ScenarioConfig &cfg) {
  return {{0.0, cfg.v_min, -kPi, cfg.omega_min}, {1.0, cfg.v_max, kPi, cfg.omega_max}};
}

bool within_bounds(const UavAction &a, const ActionBounds &b) {
  const auto v = to_array(a);
  for (int i = 0; i < kActionDim; ++i) {
    if (!(v[i] >= b.lo[i] && v[i] <= b.hi[i])) return false;
  }
  return true;
}

std::array<double, kActionDim> to_array(const UavAction &a) {
  return {a.excitation, a.speed, a.heading, a.vertical_speed};
}

UavAction from_array(const std::array<double, kActionDim> &v) { return {v[0], v[1], v[2], v[3]}; }

std::size_t observation_size(const ScenarioConfig &cfg) {
  return static_cast<std::size_t>(3 * cfg.num_uavs + 2 * (cfg.num_users_k + cfg.num_users_j));
}

std::vector<double> observation(const Deployment &d) {
  std::vector<double> obs;
  obs.reserve(3 * d.swarm.size() + 2 * (d.users_k.size() + d.users_j.size()));
  for (const auto &u : d.swarm.uavs) {
    obs.push_back(u.position.x);
    obs.push_back(u.position.y);
    obs.push_back(u.position.z);
  }
  for (const auto *side : {&d.users_k, &d.users_j}) {
    for (const auto &u : *side) {
      obs.push_back(u.position.x);
      obs.push_back(u.position.y);
    }
  }
  return obs;
}

double penalty_weight(int t, int t_max, double epsilon) {
  if (t_max <= 0) throw std::invalid_argument("penalty_weight: t_max must be positive");
  if (t < 0) throw std::invalid_argument("penalty_weight: t must be non-negative");
  return epsilon + (1.0 - epsilon) * std::min(static_cast<double>(t) / t_max, 1.0);
}

double objective(double rate, double energy, double lambda1, double lambda2) {
  return lambda1 * rate - lambda2 * energy;
}

double cosine_similarity(const Position3 &q, const Position3 &z) {
  const double nq = q.norm();
  const double nz = z.norm();
  if (nq == 0.0 || nz == 0.0) return 0.0;
  return std::clamp(q.dot(z) / (nq * nz), -1.0, 1.0);
}

int ConstraintFlags::collisions_of(std::size_t m) const {
  int c = 0;
  for (int f : too_close[m]) c += f;
  return c;
}

ConstraintFlags constraint_check(const SwarmState &swarm, const ScenarioConfig &cfg, double rate_k, double rate_j) {
  const std::size_t n = swarm.size();
  ConstraintFlags f;
  f.out_of_box.assign(n, 0);
  f.too_close.assign(n, std::vector<int>(n, 0));
  for (std::size_t m = 0; m < n; ++m) {
    f.out_of_box[m] = inside_region(swarm.uavs[m].position, cfg) ? 0 : 1;
    for (std::size_t k = m + 1; k < n; ++k) {
      if (distance(swarm.uavs[m].position, swarm.uavs[k].position) < cfg.d_min) {
        f.too_close[m][k] = 1;
        f.too_close[k][m] = 1;
      }
    }
  }
  f.rate_floor_k = rate_k < cfg.rate_floor_k_bps;
  f.rate_floor_j = rate_j < cfg.rate_floor_j_bps;
  return f;
}

double agent_reward(std::size_t m, const SlotMetrics &metrics, const Position3 &before, const Position3 &after,
                    const Position3 &ris_position, const Position3 &reference, const RewardParams &params, int t,
                    int t_max) {
  const ConstraintFlags &f = metrics.flags;
  if (!f.feasible(m)) {
    const double w = penalty_weight(t, t_max, params.epsilon);
    return -(w * f.out_of_box[m] + w * f.collisions_of(m));
  }
  const double eta = params.lambda1 * metrics.rate_bps * params.rate_scale - params.lambda2 * metrics.energy_j[m];
  const double guide = params.zeta1 * cosine_similarity(ris_position - before, after - before);
  return eta + guide - params.zeta2 * distance(reference, after);
}

RisController atso_controller(const AnnealConfig &cfg) {
  return [cfg](const ChannelRealization &chan, const StarRisState &state, Rng &rng) {
    return atso_optimize(chan, state, cfg, rng);
  };
}

Environment::Environment(const SimConfig &cfg, std::uint64_t seed)
    : cfg_(cfg), rng_(seed), atso_(atso_controller(cfg.anneal)) {
  reference_ = cfg_.reward.reference_point ? *cfg_.reward.reference_point : cfg_.scenario.region_center();
  reset();
}

std::vector<double> Environment::reset(std::optional<std::uint64_t> seed) {
  if (seed) rng_ = RngStreams(*seed);
  deploy_ = init_deployment(cfg_.scenario, rng_.init);
  ris_ = StarRisState(static_cast<std::size_t>(cfg_.scenario.ris_elements));
  chan_ = ChannelRealization{};
  slot_ = 0;
  return observation(deploy_);
}

StepOutcome Environment::step(const std::vector<UavAction> &actions) { return step(actions, atso_); }

StepOutcome Environment::step(const std::vector<UavAction> &actions, const RisController &controller) {
  const ScenarioConfig &sc = cfg_.scenario;
  if (actions.size() != deploy_.swarm.size()) {
    throw std::invalid_argument("step: expected " + std::to_string(deploy_.swarm.size()) + " actions, got " +
                                std::to_string(actions.size()));
  }
  if (done()) throw std::logic_error("step: episode already finished");
  const double dt = sc.slot_seconds;

  // Kinematics.
  std::vector<Position3> before(actions.size());
  std::vector<double> energy(actions.size());
  for (std::size_t m = 0; m < actions.size(); ++m) {
    UavState &u = deploy_.swarm.uavs[m];
    const UavAction &a = actions[m];
    before[m] = u.position;
    u.excitation = std::clamp(a.excitation, 0.0, 1.0);
    u.speed = a.speed;
    u.heading = a.heading;
    u.vertical_speed = a.vertical_speed;
    u.position.x += a.speed * std::cos(a.heading) * dt;
    u.position.y += a.speed * std::sin(a.heading) * dt;
    u.position.z += a.vertical_speed * dt;
    energy[m] = flight_energy(a.speed, a.speed, u.prev_mean_speed, u.position.z, before[m].z, dt, cfg_.aero);
    u.prev_mean_speed = a.speed;
  }

  // Users.
  const GaussMarkovParams gm = gauss_markov_params(sc);
  for (auto &u : deploy_.users_k) u = gmrmm_step(u, sc.users_k, gm, rng_.mobility);
  for (auto &u : deploy_.users_j) u = gmrmm_step(u, sc.users_j, gm, rng_.mobility);

  // Channel and STAR-RIS.
  chan_ = draw_channel(deploy_.swarm, users_centroid(deploy_.users_k), users_centroid(deploy_.users_j), sc,
                       rng_.fading);
  ris_ = controller(chan_, ris_, rng_.annealing);

  SlotMetrics met;
  met.pattern = pattern_integral(deploy_.swarm, sc);
  if (met.pattern > 0.0) {
    met.gain_k = composite_gain(chan_, ris_, Side::same, met.pattern, sc.array_efficiency);
    met.gain_j = composite_gain(chan_, ris_, Side::opposite, met.pattern, sc.array_efficiency);
  }
  met.rate_k_bps = side_rate(met.gain_k, sc);
  met.rate_j_bps = side_rate(met.gain_j, sc);
  met.rate_bps = met.rate_k_bps + met.rate_j_bps;
  met.ris_metric = joint_metric(chan_, ris_);
  met.energy_j = energy;
  for (double e : energy) met.total_energy_j += e;
  met.objective = objective(met.rate_bps * cfg_.reward.rate_scale, met.total_energy_j, cfg_.reward.lambda1,
                            cfg_.reward.lambda2);
  met.flags = constraint_check(deploy_.swarm, sc, met.rate_k_bps, met.rate_j_bps);
  for (std::size_t m = 0; m < actions.size(); ++m) {
    met.boundary_violations += met.flags.out_of_box[m];
    for (std::size_t k = m + 1; k < actions.size(); ++k) met.collision_violations += met.flags.too_close[m][k];
  }

  StepOutcome out;
  out.rewards.resize(actions.size());
  for (std::size_t m = 0; m < actions.size(); ++m) {
    out.rewards[m] = agent_reward(m, met, before[m], deploy_.swarm.uavs[m].position, sc.ris_position, reference_,
                                  cfg_.reward, slot_, cfg_.reward.t_max);
    if (!std::isfinite(out.rewards[m])) {
      throw NumericError("step: non-finite reward for UAV " + std::to_string(m) + " at slot " +
                         std::to_string(slot_));
    }
  }
  out.metrics = std::move(met);
  ++slot_;
  out.observation = observation(deploy_);
  out.done = done();
  return out;
}

}  // namespace uvaa
