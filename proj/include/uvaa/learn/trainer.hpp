// SPDX-License-Identifier: Apache-2.0
//
// Episode loops: HMCD training, the random and independent-SAC baselines,
// frozen-policy evaluation and the per-episode metric schema.

#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uvaa/config.hpp"
#include "uvaa/env.hpp"
#include "uvaa/learn/masac.hpp"

namespace uvaa::learn {

enum class Method { hmcd, hmcd_no_attention, sal, random };

std::string method_name(Method m);
Method parse_method(const std::string &name);  // throws std::invalid_argument
CriticMode critic_mode(Method m);

struct EpisodeMetrics {
  int episode = 0;
  double mean_rate_bps = 0.0;
  double total_energy_j = 0.0;
  double mean_reward = 0.0;
  double mean_objective = 0.0;
  double mean_speed_mps = 0.0;
  int boundary_violations = 0;
  int collision_violations = 0;
  int rate_floor_violations = 0;

  bool operator==(const EpisodeMetrics &) const = default;
};

struct SlotRecord {
  int episode;
  int slot;
  const Environment &env;
  const std::vector<UavAction> &actions;
  const StepOutcome &outcome;
};

struct RunHooks {
  std::function<void(const SlotRecord &)> on_slot;
  // Called after every episode with the 1-based episode number.
  std::function<void(int, const Masac &)> on_episode_end;
};

struct TrainResult {
  std::vector<EpisodeMetrics> log;
  std::unique_ptr<Masac> learner;
  std::size_t transitions = 0;
  std::size_t update_rounds = 0;
};

// Builds the learner the way hmcd_train does (weights from the seed).
std::unique_ptr<Masac> make_learner(const SimConfig &cfg, Method method);

TrainResult hmcd_train(const SimConfig &cfg, Method method = Method::hmcd, const RunHooks &hooks = {});
TrainResult baseline_independent_sac(const SimConfig &cfg, const RunHooks &hooks = {});
std::vector<EpisodeMetrics> baseline_random(const SimConfig &cfg, int episodes, const RunHooks &hooks = {});

// Stochastic rollouts of a frozen learner without velocity blending.
std::vector<EpisodeMetrics> evaluate(const SimConfig &cfg, const Masac &learner, int episodes,
                                     const RunHooks &hooks = {});

std::string metrics_csv_header();
std::string metrics_csv_row(const EpisodeMetrics &m);
void write_metrics_csv(std::ostream &os, const std::vector<EpisodeMetrics> &log);

// {"episodes": n, "<field>": {"mean": .., "std": ..}, ...}
nlohmann::json summarize(const std::vector<EpisodeMetrics> &log);

double mean_reward_tail(const std::vector<EpisodeMetrics> &log, std::size_t last);

}  // namespace uvaa::learn
