// SPDX-License-Identifier: Apache-2.0
//
// Squashed-Gaussian policy and the three critic variants (attention over the
// other agents' actions, a joint-action MLP, and an individual-action MLP).

#pragma once

#include <array>
#include <vector>

#include "uvaa/config.hpp"
#include "uvaa/env.hpp"
#include "uvaa/learn/nn.hpp"

namespace uvaa::learn {

using ad::Mat;
using ad::Var;

inline constexpr double kLogStdMin = -20.0;
inline constexpr double kLogStdMax = 2.0;

// Maps policy outputs in (-1, 1) onto the action box.
struct ActionScaler {
  ActionBounds bounds;

  std::array<double, kActionDim> to_env(const double *unit) const;
  std::array<double, kActionDim> to_unit(const std::array<double, kActionDim> &env) const;
  // sum_i log((hi_i - lo_i) / 2)
  double log_scale() const;
};

// Observation centred on the region box and scaled by its half extents.
struct ObservationScaler {
  std::vector<double> center;
  std::vector<double> inv_scale;

  static ObservationScaler from_config(const ScenarioConfig &cfg);
  Mat apply(const std::vector<double> &obs) const;  // 1 x dim
  void apply_into(const std::vector<double> &obs, double *out) const;
};

class GaussianPolicy {
 public:
  GaussianPolicy() = default;
  GaussianPolicy(int obs_dim, int hidden, const ActionScaler &scaler, Rng &init);

  struct Head {
    Var mean;     // B x act
    Var log_std;  // B x act, clamped
  };
  Head forward(const Var &obs) const;

  struct Sample {
    Var unit;      // squashed action in (-1, 1), B x act
    Var log_prob;  // density of the env-scaled action, B x 1
    Mat pre_squash;
  };
  // Reparameterised sample u = mean + std * noise, a = tanh(u).
  Sample sample(const Var &obs, const Mat &noise) const;
  Sample sample(const Var &obs, Rng &rng) const;

  nn::NamedParams parameters() const { return net_.parameters(); }
  const ActionScaler &scaler() const { return scaler_; }

 private:
  nn::Mlp net_;
  ActionScaler scaler_;
};

enum class CriticMode { attention, joint_mlp, individual };

// Q_m(s, a). `actions` holds one B x act block per agent.
class Critic {
 public:
  Critic() = default;
  Critic(CriticMode mode, int agent, int num_agents, int obs_dim, const TrainConfig &cfg, Rng &init);

  Var q(const Var &obs, const std::vector<Var> &actions) const;

  // Attention weights over the other agents (B x (N-1)); empty when N = 1 or
  // the critic does not use attention.
  Mat attention_weights(const Var &obs, const std::vector<Var> &actions) const;

  nn::NamedParams parameters() const;
  CriticMode mode() const { return mode_; }

 private:
  Var embed(const Var &obs, const std::vector<Var> &actions) const;

  CriticMode mode_ = CriticMode::attention;
  int agent_ = 0;
  int num_agents_ = 1;
  int key_dim_ = 0;
  nn::Linear g_;
  Var w_q_;
  Var w_k_;
  Var w_v_;
  nn::Mlp f_;
};

}  // namespace uvaa::learn
