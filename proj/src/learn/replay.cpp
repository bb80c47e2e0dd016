// SPDX-License-Identifier: Apache-2.0

#include "uvaa/learn/replay.hpp"

#include <stdexcept>

namespace uvaa::learn {

ReplayBuffer::ReplayBuffer(std::size_t capacity, int obs_dim, int num_agents, int act_dim)
    : capacity_(capacity), obs_dim_(obs_dim), num_agents_(num_agents), act_dim_(act_dim) {
  if (capacity == 0) throw std::invalid_argument("ReplayBuffer: capacity must be positive");
  const auto cap = static_cast<Eigen::Index>(capacity);
  obs_.resize(cap, obs_dim);
  actions_.resize(cap, num_agents * act_dim);
  rewards_.resize(cap, num_agents);
  next_obs_.resize(cap, obs_dim);
}

void ReplayBuffer::push(const Transition &t) {
  if (static_cast<int>(t.obs.size()) != obs_dim_ || static_cast<int>(t.next_obs.size()) != obs_dim_ ||
      static_cast<int>(t.actions.size()) != num_agents_ * act_dim_ ||
      static_cast<int>(t.rewards.size()) != num_agents_) {
    throw std::invalid_argument("ReplayBuffer::push: transition shape mismatch");
  }
  const auto r = static_cast<Eigen::Index>(head_);
  for (int i = 0; i < obs_dim_; ++i) {
    obs_(r, i) = t.obs[i];
    next_obs_(r, i) = t.next_obs[i];
  }
  for (int i = 0; i < num_agents_ * act_dim_; ++i) actions_(r, i) = t.actions[i];
  for (int i = 0; i < num_agents_; ++i) rewards_(r, i) = t.rewards[i];
  head_ = (head_ + 1) % capacity_;
  if (size_ < capacity_) ++size_;
}

std::size_t ReplayBuffer::slot_of(std::size_t i) const {
  if (i >= size_) throw std::out_of_range("ReplayBuffer: index beyond filled region");
  const std::size_t oldest = size_ < capacity_ ? 0 : head_;
  return (oldest + i) % capacity_;
}

Transition ReplayBuffer::at(std::size_t i) const {
  const auto r = static_cast<Eigen::Index>(slot_of(i));
  Transition t;
  for (int c = 0; c < obs_dim_; ++c) {
    t.obs.push_back(obs_(r, c));
    t.next_obs.push_back(next_obs_(r, c));
  }
  for (int c = 0; c < num_agents_ * act_dim_; ++c) t.actions.push_back(actions_(r, c));
  for (int c = 0; c < num_agents_; ++c) t.rewards.push_back(rewards_(r, c));
  return t;
}

Batch ReplayBuffer::gather(const std::vector<std::size_t> &indices) const {
  const auto n = static_cast<Eigen::Index>(indices.size());
  Batch b;
  b.obs.resize(n, obs_dim_);
  b.next_obs.resize(n, obs_dim_);
  b.rewards.resize(n, num_agents_);
  b.actions.assign(static_cast<std::size_t>(num_agents_), Mat(n, act_dim_));
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto r = static_cast<Eigen::Index>(slot_of(indices[static_cast<std::size_t>(k)]));
    b.obs.row(k) = obs_.row(r);
    b.next_obs.row(k) = next_obs_.row(r);
    b.rewards.row(k) = rewards_.row(r);
    for (int m = 0; m < num_agents_; ++m) b.actions[m].row(k) = actions_.block(r, m * act_dim_, 1, act_dim_);
  }
  return b;
}

Batch ReplayBuffer::sample(std::size_t batch, Rng &rng) const {
  if (size_ == 0) throw std::logic_error("ReplayBuffer::sample: buffer is empty");
  std::vector<std::size_t> idx(batch);
  for (auto &i : idx) i = rng.index(size_);
  return gather(idx);
}

}  // namespace uvaa::learn
