// SPDX-License-Identifier: Apache-2.0

#include "uvaa/learn/agents.hpp"

#include <cmath>
#include <stdexcept>

namespace uvaa::learn {

std::array<double, kActionDim> ActionScaler::to_env(const double *unit) const {
  std::array<double, kActionDim> out{};
  for (int i = 0; i < kActionDim; ++i) {
    out[i] = bounds.lo[i] + 0.5 * (unit[i] + 1.0) * (bounds.hi[i] - bounds.lo[i]);
  }
  return out;
}

std::array<double, kActionDim> ActionScaler::to_unit(const std::array<double, kActionDim> &env) const {
  std::array<double, kActionDim> out{};
  for (int i = 0; i < kActionDim; ++i) {
    const double span = bounds.hi[i] - bounds.lo[i];
    out[i] = span > 0.0 ? 2.0 * (env[i] - bounds.lo[i]) / span - 1.0 : 0.0;
  }
  return out;
}

double ActionScaler::log_scale() const {
  double s = 0.0;
  for (int i = 0; i < kActionDim; ++i) s += std::log(0.5 * (bounds.hi[i] - bounds.lo[i]));
  return s;
}

ObservationScaler ObservationScaler::from_config(const ScenarioConfig &cfg) {
  const Position3 c = cfg.region_center();
  const double sxy = 1.0 / (0.5 * (cfg.l_max - cfg.l_min));
  const double sz = 1.0 / (0.5 * (cfg.h_max - cfg.h_min));
  ObservationScaler s;
  for (int m = 0; m < cfg.num_uavs; ++m) {
    s.center.insert(s.center.end(), {c.x, c.y, c.z});
    s.inv_scale.insert(s.inv_scale.end(), {sxy, sxy, sz});
  }
  for (int u = 0; u < cfg.num_users_k + cfg.num_users_j; ++u) {
    s.center.insert(s.center.end(), {c.x, c.y});
    s.inv_scale.insert(s.inv_scale.end(), {sxy, sxy});
  }
  return s;
}

void ObservationScaler::apply_into(const std::vector<double> &obs, double *out) const {
  if (obs.size() != center.size()) throw std::invalid_argument("ObservationScaler: observation size mismatch");
  for (std::size_t i = 0; i < obs.size(); ++i) out[i] = (obs[i] - center[i]) * inv_scale[i];
}

Mat ObservationScaler::apply(const std::vector<double> &obs) const {
  Mat m(1, static_cast<Eigen::Index>(obs.size()));
  apply_into(obs, m.data());
  return m;
}

GaussianPolicy::GaussianPolicy(int obs_dim, int hidden, const ActionScaler &scaler, Rng &init)
    : net_({obs_dim, hidden, hidden, 2 * kActionDim}, init), scaler_(scaler) {}

GaussianPolicy::Head GaussianPolicy::forward(const Var &obs) const {
  const Var out = net_.forward(obs);
  nn::require_finite(out.value(), "policy output layer");
  return {ad::slice_cols(out, 0, kActionDim),
          ad::clamp(ad::slice_cols(out, kActionDim, kActionDim), kLogStdMin, kLogStdMax)};
}

GaussianPolicy::Sample GaussianPolicy::sample(const Var &obs, const Mat &noise) const {
  const Head h = forward(obs);
  if (noise.rows() != h.mean.rows() || noise.cols() != kActionDim) {
    throw std::invalid_argument("GaussianPolicy::sample: noise shape mismatch");
  }
  const Var u = ad::add(h.mean, ad::mul(ad::exp(h.log_std), ad::constant(noise)));
  const Var unit = ad::tanh(u);

  const double half_log_2pi = 0.5 * std::log(2.0 * kPi);
  Mat base = (-0.5 * noise.array().square() - half_log_2pi).matrix();
  const Var gauss = ad::sub(ad::constant(std::move(base)), h.log_std);
  // log(1 - tanh(u)^2) = 2 (log 2 - u - softplus(-2u))
  const Var jac =
      ad::scale(ad::add_scalar(ad::neg(ad::add(u, ad::softplus(ad::scale(u, -2.0)))), std::log(2.0)), 2.0);
  const Var log_prob = ad::add_scalar(ad::row_sum(ad::sub(gauss, jac)), -scaler_.log_scale());
  nn::require_finite(log_prob.value(), "policy log-prob");
  return {unit, log_prob, u.value()};
}

GaussianPolicy::Sample GaussianPolicy::sample(const Var &obs, Rng &rng) const {
  Mat noise(obs.rows(), kActionDim);
  for (Eigen::Index r = 0; r < noise.rows(); ++r) {
    for (int c = 0; c < kActionDim; ++c) noise(r, c) = rng.normal();
  }
  return sample(obs, noise);
}

Critic::Critic(CriticMode mode, int agent, int num_agents, int obs_dim, const TrainConfig &cfg, Rng &init)
    : mode_(mode), agent_(agent), num_agents_(num_agents), key_dim_(cfg.key_dim) {
  if (agent < 0 || agent >= num_agents) throw std::invalid_argument("Critic: agent index out of range");
  const int h = cfg.embed_hidden;
  const int hh = cfg.head_hidden;
  switch (mode) {
    case CriticMode::attention: {
      g_ = nn::Linear(obs_dim + kActionDim, h, init);
      auto uni = [&init](int r, int c, double bound) {
        Mat m(r, c);
        for (int j = 0; j < c; ++j) {
          for (int i = 0; i < r; ++i) m(i, j) = init.uniform(-bound, bound);
        }
        return ad::param(std::move(m));
      };
      w_q_ = uni(h, key_dim_, 1.0 / std::sqrt(static_cast<double>(h)));
      w_k_ = uni(kActionDim, key_dim_, 1.0 / std::sqrt(static_cast<double>(kActionDim)));
      w_v_ = uni(kActionDim, key_dim_, 1.0 / std::sqrt(static_cast<double>(kActionDim)));
      f_ = nn::Mlp({h + key_dim_, hh, hh, 1}, init);
      break;
    }
    case CriticMode::joint_mlp:
      g_ = nn::Linear(obs_dim + num_agents * kActionDim, h, init);
      f_ = nn::Mlp({h, hh, hh, 1}, init);
      break;
    case CriticMode::individual:
      g_ = nn::Linear(obs_dim + kActionDim, h, init);
      f_ = nn::Mlp({h, hh, hh, 1}, init);
      break;
  }
}

Var Critic::embed(const Var &obs, const std::vector<Var> &actions) const {
  if (static_cast<int>(actions.size()) != num_agents_) throw std::invalid_argument("Critic: action count mismatch");
  if (mode_ == CriticMode::joint_mlp) {
    std::vector<Var> parts{obs};
    parts.insert(parts.end(), actions.begin(), actions.end());
    return ad::relu(g_.forward(ad::concat_cols(parts)));
  }
  return ad::relu(g_.forward(ad::concat_cols({obs, actions[agent_]})));
}

Mat Critic::attention_weights(const Var &obs, const std::vector<Var> &actions) const {
  if (mode_ != CriticMode::attention || num_agents_ < 2) return {};
  const Var e = embed(obs, actions);
  const Var q = ad::matmul(e, w_q_);
  const double inv = 1.0 / std::sqrt(static_cast<double>(key_dim_));
  std::vector<Var> scores;
  for (int n = 0; n < num_agents_; ++n) {
    if (n == agent_) continue;
    scores.push_back(ad::scale(ad::row_sum(ad::mul(q, ad::matmul(actions[n], w_k_))), inv));
  }
  return ad::softmax_rows(ad::concat_cols(scores)).value();
}

Var Critic::q(const Var &obs, const std::vector<Var> &actions) const {
  const Var e = embed(obs, actions);
  nn::require_finite(e.value(), "critic embedding g");
  Var out;
  if (mode_ == CriticMode::attention) {
    Var x;
    if (num_agents_ < 2) {
      x = ad::constant(Mat::Zero(obs.rows(), key_dim_));
    } else {
      const Var q = ad::matmul(e, w_q_);
      const double inv = 1.0 / std::sqrt(static_cast<double>(key_dim_));
      std::vector<Var> scores;
      std::vector<Var> values;
      for (int n = 0; n < num_agents_; ++n) {
        if (n == agent_) continue;
        scores.push_back(ad::scale(ad::row_sum(ad::mul(q, ad::matmul(actions[n], w_k_))), inv));
        values.push_back(ad::matmul(actions[n], w_v_));
      }
      const Var s = ad::softmax_rows(ad::concat_cols(scores));
      for (std::size_t j = 0; j < values.size(); ++j) {
        const Var term = ad::mul_col(values[j], ad::slice_cols(s, static_cast<Eigen::Index>(j), 1));
        x = j == 0 ? term : ad::add(x, term);
      }
    }
    out = f_.forward(ad::concat_cols({e, x}));
  } else {
    out = f_.forward(e);
  }
  nn::require_finite(out.value(), "critic head f");
  return out;
}

nn::NamedParams Critic::parameters() const {
  nn::NamedParams out;
  nn::append(out, "g", g_.parameters());
  if (mode_ == CriticMode::attention) {
    out.emplace_back("w_q", w_q_);
    out.emplace_back("w_k", w_k_);
    out.emplace_back("w_v", w_v_);
  }
  nn::append(out, "f", f_.parameters());
  return out;
}

}  // namespace uvaa::learn
