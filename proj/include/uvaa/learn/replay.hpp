// SPDX-License-Identifier: Apache-2.0
//
// Fixed-capacity ring buffer of joint transitions with uniform sampling.

#pragma once

#include <vector>

#include "uvaa/learn/autodiff.hpp"
#include "uvaa/rng.hpp"

namespace uvaa::learn {

using ad::Mat;

// Observations are stored already normalised; actions are the squashed
// per-agent actions in (-1, 1) after the velocity transition.
struct Transition {
  std::vector<double> obs;
  std::vector<double> actions;  // agent-major, kActionDim each
  std::vector<double> rewards;  // one per agent
  std::vector<double> next_obs;
};

struct Batch {
  Mat obs;                   // B x obs_dim
  std::vector<Mat> actions;  // per agent, B x act
  Mat rewards;               // B x N
  Mat next_obs;              // B x obs_dim
};

class ReplayBuffer {
 public:
  ReplayBuffer(std::size_t capacity, int obs_dim, int num_agents, int act_dim);

  void push(const Transition &t);
  std::size_t size() const { return size_; }
  std::size_t capacity() const { return capacity_; }

  // Transition in insertion order: 0 is the oldest still stored.
  Transition at(std::size_t i) const;

  Batch gather(const std::vector<std::size_t> &indices) const;
  // Uniform with replacement over the filled region.
  Batch sample(std::size_t batch, Rng &rng) const;

 private:
  std::size_t slot_of(std::size_t i) const;

  std::size_t capacity_;
  int obs_dim_;
  int num_agents_;
  int act_dim_;
  std::size_t size_ = 0;
  std::size_t head_ = 0;  // next write position
  Mat obs_;
  Mat actions_;
  Mat rewards_;
  Mat next_obs_;
};

}  // namespace uvaa::learn
