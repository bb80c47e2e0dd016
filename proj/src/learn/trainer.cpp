// SPDX-License-Identifier: Apache-2.0

#include "uvaa/learn/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace uvaa::learn {

std::string method_name(Method m) {
  switch (m) {
    case Method::hmcd:
      return "hmcd";
    case Method::hmcd_no_attention:
      return "hmcd-noattn";
    case Method::sal:
      return "sal";
    case Method::random:
      return "random";
  }
  return "hmcd";
}

Method parse_method(const std::string &name) {
  for (Method m : {Method::hmcd, Method::hmcd_no_attention, Method::sal, Method::random}) {
    if (method_name(m) == name) return m;
  }
  throw std::invalid_argument("unknown method '" + name + "' (expected hmcd, hmcd-noattn, sal or random)");
}

CriticMode critic_mode(Method m) {
  switch (m) {
    case Method::hmcd:
      return CriticMode::attention;
    case Method::hmcd_no_attention:
      return CriticMode::joint_mlp;
    case Method::sal:
      return CriticMode::individual;
    case Method::random:
      break;
  }
  throw std::invalid_argument("method '" + method_name(m) + "' has no learner");
}

namespace {

class EpisodeAccumulator {
 public:
  void add(const std::vector<UavAction> &actions, const StepOutcome &out) {
    const SlotMetrics &m = out.metrics;
    ++slots_;
    rate_ += m.rate_bps;
    energy_ += m.total_energy_j;
    objective_ += m.objective;
    for (double r : out.rewards) reward_ += r;
    rewards_ += out.rewards.size();
    for (const auto &a : actions) speed_ += a.speed;
    speeds_ += actions.size();
    boundary_ += m.boundary_violations;
    collision_ += m.collision_violations;
    floor_ += static_cast<int>(m.flags.rate_floor_k) + static_cast<int>(m.flags.rate_floor_j);
  }

  EpisodeMetrics finish(int episode) const {
    EpisodeMetrics e;
    e.episode = episode;
    const double n = slots_ > 0 ? static_cast<double>(slots_) : 1.0;
    e.mean_rate_bps = rate_ / n;
    e.total_energy_j = energy_;
    e.mean_objective = objective_ / n;
    e.mean_reward = rewards_ > 0 ? reward_ / static_cast<double>(rewards_) : 0.0;
    e.mean_speed_mps = speeds_ > 0 ? speed_ / static_cast<double>(speeds_) : 0.0;
    e.boundary_violations = boundary_;
    e.collision_violations = collision_;
    e.rate_floor_violations = floor_;
    return e;
  }

 private:
  std::size_t slots_ = 0;
  double rate_ = 0.0;
  double energy_ = 0.0;
  double objective_ = 0.0;
  double reward_ = 0.0;
  std::size_t rewards_ = 0;
  double speed_ = 0.0;
  std::size_t speeds_ = 0;
  int boundary_ = 0;
  int collision_ = 0;
  int floor_ = 0;
};

std::vector<double> flatten_row(const Mat &row) {
  return std::vector<double>(row.data(), row.data() + row.size());
}

}  // namespace

std::unique_ptr<Masac> make_learner(const SimConfig &cfg, Method method) {
  Rng weights(derive_seed(cfg.seed, "weights"));
  const auto obs_dim = static_cast<int>(observation_size(cfg.scenario));
  return std::make_unique<Masac>(cfg.scenario.num_uavs, obs_dim, ActionScaler{action_bounds(cfg.scenario)}, cfg.train,
                                 critic_mode(method), weights);
}

TrainResult hmcd_train(const SimConfig &cfg, Method method, const RunHooks &hooks) {
  const ScenarioConfig &sc = cfg.scenario;
  const TrainConfig &tc = cfg.train;
  TrainResult result;
  result.learner = make_learner(cfg, method);
  Masac &learner = *result.learner;

  Environment env(cfg, cfg.seed);
  RngStreams rs(cfg.seed);
  const ObservationScaler obs_scaler = ObservationScaler::from_config(sc);
  const ActionScaler &act_scaler = learner.scaler();
  const int n_agents = sc.num_uavs;
  const auto obs_dim = static_cast<int>(observation_size(sc));
  ReplayBuffer buffer(static_cast<std::size_t>(tc.buffer_capacity), obs_dim, n_agents, kActionDim);

  for (int episode = 1; episode <= tc.episodes; ++episode) {
    std::vector<double> obs = env.reset();
    Mat obs_n = obs_scaler.apply(obs);
    EpisodeAccumulator acc;
    const int guidance_episode = tc.velocity_guidance ? episode : tc.episodes;
    for (int slot = 0; slot < sc.slots_per_episode; ++slot) {
      auto units = learner.act(obs_n, rs.policy);
      std::vector<UavAction> actions;
      Transition tr;
      tr.obs = flatten_row(obs_n);
      for (auto &u : units) {
        auto a = act_scaler.to_env(u.data());
        a[1] = velocity_transition(a[1], guidance_episode, tc.episodes, tc.v_me, tc.sigma_b, sc.v_min, sc.v_max,
                                   rs.policy);
        u[1] = act_scaler.to_unit(a)[1];
        actions.push_back(from_array(a));
        tr.actions.insert(tr.actions.end(), u.begin(), u.end());
      }
      StepOutcome out;
      try {
        out = env.step(actions);
      } catch (const NumericError &e) {
        throw NumericError(std::string(e.what()) + " (episode " + std::to_string(episode) + ", slot " +
                           std::to_string(slot) + ")");
      }
      if (hooks.on_slot) hooks.on_slot({episode, slot, env, actions, out});
      acc.add(actions, out);
      Mat next_n = obs_scaler.apply(out.observation);
      tr.rewards = out.rewards;
      tr.next_obs = flatten_row(next_n);
      buffer.push(tr);
      obs_n = std::move(next_n);

      if (buffer.size() >= static_cast<std::size_t>(tc.batch_size)) {
        for (int u = 0; u < tc.updates_per_slot; ++u) {
          try {
            learner.update(buffer.sample(static_cast<std::size_t>(tc.batch_size), rs.learner), rs.learner);
          } catch (const NumericError &e) {
            throw NumericError(std::string(e.what()) + " (episode " + std::to_string(episode) + ", slot " +
                               std::to_string(slot) + ")");
          }
          ++result.update_rounds;
        }
      }
    }
    result.log.push_back(acc.finish(episode));
    if (hooks.on_episode_end) hooks.on_episode_end(episode, learner);
  }
  result.transitions = buffer.size();
  return result;
}

TrainResult baseline_independent_sac(const SimConfig &cfg, const RunHooks &hooks) {
  return hmcd_train(cfg, Method::sal, hooks);
}

std::vector<EpisodeMetrics> baseline_random(const SimConfig &cfg, int episodes, const RunHooks &hooks) {
  const ScenarioConfig &sc = cfg.scenario;
  Environment env(cfg, cfg.seed);
  RngStreams rs(cfg.seed);
  const ActionBounds b = action_bounds(sc);
  std::vector<EpisodeMetrics> log;
  for (int episode = 1; episode <= episodes; ++episode) {
    env.reset();
    EpisodeAccumulator acc;
    for (int slot = 0; slot < sc.slots_per_episode; ++slot) {
      std::vector<UavAction> actions;
      for (int m = 0; m < sc.num_uavs; ++m) {
        std::array<double, kActionDim> a{};
        for (int i = 0; i < kActionDim; ++i) a[i] = rs.policy.uniform(b.lo[i], b.hi[i]);
        actions.push_back(from_array(a));
      }
      const StepOutcome out = env.step(actions);
      if (hooks.on_slot) hooks.on_slot({episode, slot, env, actions, out});
      acc.add(actions, out);
    }
    log.push_back(acc.finish(episode));
  }
  return log;
}

std::vector<EpisodeMetrics> evaluate(const SimConfig &cfg, const Masac &learner, int episodes,
                                     const RunHooks &hooks) {
  const ScenarioConfig &sc = cfg.scenario;
  Environment env(cfg, cfg.seed);
  RngStreams rs(cfg.seed);
  const ObservationScaler obs_scaler = ObservationScaler::from_config(sc);
  std::vector<EpisodeMetrics> log;
  for (int episode = 1; episode <= episodes; ++episode) {
    Mat obs_n = obs_scaler.apply(env.reset());
    EpisodeAccumulator acc;
    for (int slot = 0; slot < sc.slots_per_episode; ++slot) {
      std::vector<UavAction> actions;
      for (const auto &u : learner.act(obs_n, rs.policy)) actions.push_back(from_array(learner.scaler().to_env(u.data())));
      const StepOutcome out = env.step(actions);
      if (hooks.on_slot) hooks.on_slot({episode, slot, env, actions, out});
      acc.add(actions, out);
      obs_n = obs_scaler.apply(out.observation);
    }
    log.push_back(acc.finish(episode));
  }
  return log;
}

std::string metrics_csv_header() {
  return "episode,mean_rate_bps,total_energy_j,mean_reward,mean_objective,mean_speed_mps,boundary_violations,"
         "collision_violations,rate_floor_violations";
}

std::string metrics_csv_row(const EpisodeMetrics &m) {
  char buf[512];
  std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%d", m.episode, m.mean_rate_bps,
                m.total_energy_j, m.mean_reward, m.mean_objective, m.mean_speed_mps, m.boundary_violations,
                m.collision_violations, m.rate_floor_violations);
  return buf;
}

void write_metrics_csv(std::ostream &os, const std::vector<EpisodeMetrics> &log) {
  os << metrics_csv_header() << '\n';
  for (const auto &m : log) os << metrics_csv_row(m) << '\n';
}

nlohmann::json summarize(const std::vector<EpisodeMetrics> &log) {
  nlohmann::json j;
  j["episodes"] = log.size();
  auto stat = [&log](auto field) {
    nlohmann::json s;
    if (log.empty()) {
      s["mean"] = nullptr;
      s["std"] = nullptr;
      return s;
    }
    double mean = 0.0;
    for (const auto &m : log) mean += static_cast<double>(field(m));
    mean /= static_cast<double>(log.size());
    double var = 0.0;
    for (const auto &m : log) var += std::pow(static_cast<double>(field(m)) - mean, 2);
    s["mean"] = mean;
    s["std"] = log.size() > 1 ? std::sqrt(var / static_cast<double>(log.size() - 1)) : 0.0;
    return s;
  };
  j["mean_rate_bps"] = stat([](const EpisodeMetrics &m) { return m.mean_rate_bps; });
  j["total_energy_j"] = stat([](const EpisodeMetrics &m) { return m.total_energy_j; });
  j["mean_reward"] = stat([](const EpisodeMetrics &m) { return m.mean_reward; });
  j["mean_objective"] = stat([](const EpisodeMetrics &m) { return m.mean_objective; });
  j["mean_speed_mps"] = stat([](const EpisodeMetrics &m) { return m.mean_speed_mps; });
  j["boundary_violations"] = stat([](const EpisodeMetrics &m) { return m.boundary_violations; });
  j["collision_violations"] = stat([](const EpisodeMetrics &m) { return m.collision_violations; });
  j["rate_floor_violations"] = stat([](const EpisodeMetrics &m) { return m.rate_floor_violations; });
  return j;
}

double mean_reward_tail(const std::vector<EpisodeMetrics> &log, std::size_t last) {
  if (log.empty()) return 0.0;
  const std::size_t n = std::min(last, log.size());
  double s = 0.0;
  for (std::size_t i = log.size() - n; i < log.size(); ++i) s += log[i].mean_reward;
  return s / static_cast<double>(n);
}

}  // namespace uvaa::learn
