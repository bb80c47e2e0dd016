// SPDX-License-Identifier: Apache-2.0

#include "uvaa/learn/masac.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace uvaa::learn {

double velocity_transition(double v_raw, int episode, int num_episodes, double v_me, double sigma_b, double v_min,
                           double v_max, Rng &rng) {
  if (num_episodes <= 0 || episode < 0 || episode > num_episodes) {
    throw std::invalid_argument("velocity_transition: requires 0 <= n <= N_E and N_E > 0");
  }
  const double v_b = rng.normal(v_me, sigma_b);
  const double zeta = static_cast<double>(episode) / num_episodes;
  if (zeta == 1.0) return std::clamp(v_raw, v_min, v_max);
  return std::clamp(zeta * v_raw + (1.0 - zeta) * v_b, v_min, v_max);
}

MasacOptions masac_options(const TrainConfig &cfg, CriticMode mode) {
  return {mode, cfg.twin_critic, cfg.gamma, cfg.tau, cfg.alpha, cfg.learning_rate};
}

Masac::Masac(int num_agents, int obs_dim, const ActionScaler &scaler, const TrainConfig &cfg, CriticMode mode,
             Rng &init)
    : opts_(masac_options(cfg, mode)), scaler_(scaler) {
  if (num_agents < 1) throw std::invalid_argument("Masac: need at least one agent");
  const int n_critics = opts_.twin_critic ? 2 : 1;
  Rng scratch(0);  // target nets are overwritten by a hard copy below
  agents_.resize(static_cast<std::size_t>(num_agents));
  for (int m = 0; m < num_agents; ++m) {
    AgentNets &a = agents_[static_cast<std::size_t>(m)];
    a.policy = GaussianPolicy(obs_dim, cfg.policy_hidden, scaler, init);
    a.target_policy = GaussianPolicy(obs_dim, cfg.policy_hidden, scaler, scratch);
    nn::hard_copy(nn::values_of(a.policy.parameters()), nn::values_of(a.target_policy.parameters()));
    for (int c = 0; c < n_critics; ++c) {
      a.critics.emplace_back(mode, m, num_agents, obs_dim, cfg, init);
      a.target_critics.emplace_back(mode, m, num_agents, obs_dim, cfg, scratch);
      nn::hard_copy(nn::values_of(a.critics.back().parameters()),
                    nn::values_of(a.target_critics.back().parameters()));
      a.critic_opts.emplace_back(nn::values_of(a.critics.back().parameters()), opts_.learning_rate);
    }
    a.policy_opt = nn::Adam(nn::values_of(a.policy.parameters()), opts_.learning_rate);
  }
}

std::vector<std::array<double, kActionDim>> Masac::act(const Mat &obs, Rng &rng) const {
  ad::NoGradGuard guard;
  const Var o = ad::constant(obs);
  std::vector<std::array<double, kActionDim>> out;
  for (const auto &a : agents_) {
    const auto s = a.policy.sample(o, rng);
    std::array<double, kActionDim> u{};
    for (int i = 0; i < kActionDim; ++i) u[i] = s.unit.value()(0, i);
    out.push_back(u);
  }
  return out;
}

Var Masac::min_q(const std::vector<Critic> &critics, const Var &obs, const std::vector<Var> &actions) const {
  Var q = critics[0].q(obs, actions);
  if (critics.size() > 1) {
    const Var q2 = critics[1].q(obs, actions);
    // min(a, b) = a - relu(a - b)
    q = ad::sub(q, ad::relu(ad::sub(q, q2)));
  }
  return q;
}

void Masac::sample_next(const Batch &batch, Rng &rng, std::vector<Mat> &next_actions,
                        std::vector<Mat> &next_log_prob) const {
  ad::NoGradGuard guard;
  const Var next_obs = ad::constant(batch.next_obs);
  next_actions.clear();
  next_log_prob.clear();
  for (const auto &a : agents_) {
    const auto s = a.target_policy.sample(next_obs, rng);
    next_actions.push_back(s.unit.value());
    next_log_prob.push_back(s.log_prob.value());
  }
}

Mat Masac::target_values(int m, const Batch &batch, const std::vector<Mat> &next_actions,
                         const Mat &next_log_prob) const {
  ad::NoGradGuard guard;
  std::vector<Var> acts;
  for (const auto &na : next_actions) acts.push_back(ad::constant(na));
  const Var q = min_q(agent(m).target_critics, ad::constant(batch.next_obs), acts);
  Mat y = batch.rewards.col(m) + opts_.gamma * (q.value() - opts_.alpha * next_log_prob);
  nn::require_finite(y, "soft target (agent " + std::to_string(m) + ")");
  return y;
}

Var Masac::critic_loss(int m, int which, const Batch &batch, const Mat &target) const {
  std::vector<Var> acts;
  for (const auto &a : batch.actions) acts.push_back(ad::constant(a));
  const Var q = agent(m).critics[static_cast<std::size_t>(which)].q(ad::constant(batch.obs), acts);
  return ad::mean(ad::scale(ad::square(ad::sub(q, ad::constant(target))), 0.5));
}

Var Masac::actor_loss(int m, const Batch &batch, const Mat &noise) const {
  const Var obs = ad::constant(batch.obs);
  const auto s = agent(m).policy.sample(obs, noise);
  std::vector<Var> acts;
  for (int n = 0; n < num_agents(); ++n) {
    acts.push_back(n == m ? s.unit : ad::constant(batch.actions[static_cast<std::size_t>(n)]));
  }
  const Var q = min_q(agent(m).critics, obs, acts);
  return ad::mean(ad::sub(ad::scale(s.log_prob, opts_.alpha), q));
}

UpdateLosses Masac::update(const Batch &batch, Rng &rng) {
  UpdateLosses losses;
  std::vector<Mat> next_actions;
  std::vector<Mat> next_log_prob;
  sample_next(batch, rng, next_actions, next_log_prob);

  for (int m = 0; m < num_agents(); ++m) {
    AgentNets &a = agent(m);
    const Mat y = target_values(m, batch, next_actions, next_log_prob[static_cast<std::size_t>(m)]);
    double critic_total = 0.0;
    for (std::size_t c = 0; c < a.critics.size(); ++c) {
      const Var loss = critic_loss(m, static_cast<int>(c), batch, y);
      if (!std::isfinite(loss.item())) throw NumericError("critic loss is not finite (agent " + std::to_string(m) + ")");
      ad::backward(loss);
      a.critic_opts[c].step();
      critic_total += loss.item();
    }
    losses.critic.push_back(critic_total);

    Mat noise(batch.obs.rows(), kActionDim);
    for (Eigen::Index r = 0; r < noise.rows(); ++r) {
      for (int i = 0; i < kActionDim; ++i) noise(r, i) = rng.normal();
    }
    const Var loss = actor_loss(m, batch, noise);
    if (!std::isfinite(loss.item())) throw NumericError("actor loss is not finite (agent " + std::to_string(m) + ")");
    ad::backward(loss);
    a.policy_opt.step();
    for (auto &opt : a.critic_opts) opt.zero_grad();
    losses.actor.push_back(loss.item());

    nn::soft_update(nn::values_of(a.policy.parameters()), nn::values_of(a.target_policy.parameters()), opts_.tau);
    for (std::size_t c = 0; c < a.critics.size(); ++c) {
      nn::soft_update(nn::values_of(a.critics[c].parameters()), nn::values_of(a.target_critics[c].parameters()),
                      opts_.tau);
    }
  }
  return losses;
}

nn::NamedParams Masac::parameters() const {
  nn::NamedParams out;
  for (int m = 0; m < num_agents(); ++m) {
    const AgentNets &a = agent(m);
    const std::string p = "agent" + std::to_string(m);
    nn::append(out, p + ".policy", a.policy.parameters());
    nn::append(out, p + ".target_policy", a.target_policy.parameters());
    for (std::size_t c = 0; c < a.critics.size(); ++c) {
      nn::append(out, p + ".critic" + std::to_string(c), a.critics[c].parameters());
      nn::append(out, p + ".target_critic" + std::to_string(c), a.target_critics[c].parameters());
    }
  }
  return out;
}

}  // namespace uvaa::learn
