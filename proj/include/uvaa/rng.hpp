// SPDX-License-Identifier: Apache-2.0
//
// Deterministic random-number contract. Every consumer draws from its own
// named substream so that, e.g., changing the number of policy samples never
// perturbs user mobility or fading.

#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "uvaa/types.hpp"

namespace uvaa {

class Rng {
 public:
  Rng() : Rng(0) {}
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  double normal() { return std::normal_distribution<double>(0.0, 1.0)(engine_); }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

  // Circularly-symmetric complex Gaussian with E|z|^2 = 1.
  Complex complex_normal() {
    constexpr double kHalfStd = 0.70710678118654752440;
    const double re = normal() * kHalfStd;
    const double im = normal() * kHalfStd;
    return {re, im};
  }

  std::mt19937_64 &engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Derives a seed for substream `name` from a master seed (splitmix64 over
// the master seed xor an FNV-1a hash of the name).
std::uint64_t derive_seed(std::uint64_t master, std::string_view name);

struct RngStreams {
  Rng mobility;
  Rng fading;
  Rng policy;
  Rng annealing;
  Rng init;
  Rng learner;

  RngStreams() : RngStreams(0) {}
  explicit RngStreams(std::uint64_t seed)
      : mobility(derive_seed(seed, "mobility")),
        fading(derive_seed(seed, "fading")),
        policy(derive_seed(seed, "policy")),
        annealing(derive_seed(seed, "annealing")),
        init(derive_seed(seed, "init")),
        learner(derive_seed(seed, "learner")) {}
};

std::uint64_t fnv1a64(std::string_view data);

}  // namespace uvaa
