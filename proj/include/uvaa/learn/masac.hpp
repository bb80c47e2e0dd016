// SPDX-License-Identifier: Apache-2.0
//
// Multi-agent soft actor-critic: per-agent actors and centralised critics with
// target copies, soft updates and the training-dependent velocity blend.

#pragma once

#include <memory>
#include <vector>

#include "uvaa/learn/agents.hpp"
#include "uvaa/learn/replay.hpp"

namespace uvaa::learn {

// zeta = n / N_E; v_b ~ N(v_me, sigma_b^2);
// clamp(zeta * v_raw + (1 - zeta) * v_b, v_min, v_max). v_b is drawn on every
// call so the stream position does not depend on zeta.
double velocity_transition(double v_raw, int episode, int num_episodes, double v_me, double sigma_b, double v_min,
                           double v_max, Rng &rng);

struct MasacOptions {
  CriticMode mode = CriticMode::attention;
  bool twin_critic = false;
  double gamma = 0.9;
  double tau = 0.005;
  double alpha = 0.01;
  double learning_rate = 7e-4;
};

MasacOptions masac_options(const TrainConfig &cfg, CriticMode mode);

struct AgentNets {
  GaussianPolicy policy;
  GaussianPolicy target_policy;
  std::vector<Critic> critics;         // 1, or 2 with twin critics
  std::vector<Critic> target_critics;
  nn::Adam policy_opt;
  std::vector<nn::Adam> critic_opts;
};

struct UpdateLosses {
  std::vector<double> critic;
  std::vector<double> actor;
};

class Masac {
 public:
  Masac(int num_agents, int obs_dim, const ActionScaler &scaler, const TrainConfig &cfg, CriticMode mode, Rng &init);

  int num_agents() const { return static_cast<int>(agents_.size()); }
  const MasacOptions &options() const { return opts_; }
  const ActionScaler &scaler() const { return scaler_; }
  AgentNets &agent(int m) { return agents_[static_cast<std::size_t>(m)]; }
  const AgentNets &agent(int m) const { return agents_[static_cast<std::size_t>(m)]; }

  // Stochastic per-agent actions in (-1, 1) for a 1 x obs_dim observation.
  std::vector<std::array<double, kActionDim>> act(const Mat &obs, Rng &rng) const;

  // Soft target for agent m: r_m + gamma (Qbar_m(s', a') - alpha log pibar_m(a'_m | s')).
  Mat target_values(int m, const Batch &batch, const std::vector<Mat> &next_actions, const Mat &next_log_prob) const;

  // Next actions and log-probs from the target policies.
  void sample_next(const Batch &batch, Rng &rng, std::vector<Mat> &next_actions, std::vector<Mat> &next_log_prob) const;

  // Loss graphs, exposed for gradient checks.
  Var critic_loss(int m, int which, const Batch &batch, const Mat &target) const;
  Var actor_loss(int m, const Batch &batch, const Mat &noise) const;

  // One round: for every agent a critic step, an actor step, then soft updates.
  UpdateLosses update(const Batch &batch, Rng &rng);

  nn::NamedParams parameters() const;  // online and target, named

 private:
  Var min_q(const std::vector<Critic> &critics, const Var &obs, const std::vector<Var> &actions) const;

  MasacOptions opts_;
  ActionScaler scaler_;
  std::vector<AgentNets> agents_;
};

}  // namespace uvaa::learn
