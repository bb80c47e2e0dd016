// SPDX-License-Identifier: Apache-2.0
//
// JSON checkpoints: named parameter arrays plus the config hash, method and
// episode counter. Loading refuses a checkpoint written under another config.

#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "uvaa/config.hpp"
#include "uvaa/learn/masac.hpp"
#include "uvaa/learn/trainer.hpp"

namespace uvaa::learn {

struct CheckpointInfo {
  std::string config_hash;
  Method method = Method::hmcd;
  int episode = 0;
};

// Thrown when a checkpoint does not match the config or the learner layout.
class CheckpointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

nlohmann::json checkpoint_json(const Masac &learner, const SimConfig &cfg, Method method, int episode);
void save_checkpoint(const std::filesystem::path &path, const Masac &learner, const SimConfig &cfg, Method method,
                     int episode);

CheckpointInfo read_checkpoint_info(const std::filesystem::path &path);

// Copies every named array into `learner` after checking the config hash.
CheckpointInfo load_checkpoint(const std::filesystem::path &path, Masac &learner, const SimConfig &cfg);
CheckpointInfo load_checkpoint(const nlohmann::json &doc, Masac &learner, const SimConfig &cfg);

}  // namespace uvaa::learn
