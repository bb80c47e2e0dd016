// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner behind the `uvaa` binary. Each run_* function writes its
// outputs into `out` and returns a process exit status:
//   0 ok, 1 runtime failure, 2 configuration error, 3 numerical failure,
//   4 checkpoint refused.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "uvaa/config.hpp"
#include "uvaa/learn/trainer.hpp"

namespace uvaa::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitCheckpoint = 4;

struct CommonOptions {
  std::optional<std::filesystem::path> config;  // defaults when unset
  std::optional<std::uint64_t> seed;
  std::filesystem::path out = "out";
  std::optional<int> episodes;
};

struct TrainOptions {
  CommonOptions common;
  std::string method = "hmcd";
  bool dump_trajectories = false;
  bool dump_channels = false;
};

struct EvalOptions {
  CommonOptions common;
  std::filesystem::path checkpoint;
  bool dump_trajectories = false;
  bool dump_channels = false;
};

struct SweepOptions {
  CommonOptions common;
  std::string axis;  // uav_count | ris_elements
  std::vector<int> values;
  std::string method = "random";
  int eval_episodes = 5;
};

struct OracleOptions {
  CommonOptions common;
  int trials = 100;
};

// Loads and finalizes the config, applying --seed and --episodes overrides.
SimConfig resolve_config(const CommonOptions &opts);

int run_train(const TrainOptions &opts);
int run_eval(const EvalOptions &opts);
int run_sweep(const SweepOptions &opts);
int run_oracle(const OracleOptions &opts);

// Oracle report without touching the filesystem.
nlohmann::json oracle_report(const SimConfig &cfg, int trials);

std::string sweep_csv_header();

// Full argv entry point (CLI11 parsing plus dispatch).
int main_entry(int argc, char **argv);

}  // namespace uvaa::cli
