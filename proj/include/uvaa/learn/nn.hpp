// SPDX-License-Identifier: Apache-2.0
//
// Layers, parameter bookkeeping and the Adam optimiser on top of autodiff.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "uvaa/learn/autodiff.hpp"
#include "uvaa/rng.hpp"

namespace uvaa::nn {

using ad::Mat;
using ad::Var;

// Ordered (name, parameter) pairs. Copies share the underlying tensors.
using NamedParams = std::vector<std::pair<std::string, Var>>;

std::vector<Var> values_of(const NamedParams &p);
void append(NamedParams &out, const std::string &prefix, const NamedParams &in);

// Affine layer y = x W + b with W ~ U(-1/sqrt(in), 1/sqrt(in)) and b alike.
class Linear {
 public:
  Linear() = default;
  Linear(int in, int out, Rng &rng);

  Var forward(const Var &x) const;
  NamedParams parameters() const { return {{"w", w_}, {"b", b_}}; }
  int in() const { return static_cast<int>(w_.rows()); }
  int out() const { return static_cast<int>(w_.cols()); }

 private:
  Var w_;
  Var b_;
};

// ReLU between layers, linear output.
class Mlp {
 public:
  Mlp() = default;
  Mlp(const std::vector<int> &sizes, Rng &rng);

  Var forward(const Var &x) const;
  NamedParams parameters() const;

 private:
  std::vector<Linear> layers_;
};

class Adam {
 public:
  Adam() = default;
  explicit Adam(std::vector<Var> params, double lr, double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

  // Applies one update from the accumulated gradients and clears them.
  void step();
  void zero_grad();
  long steps() const { return t_; }

 private:
  std::vector<Var> params_;
  std::vector<Mat> m_;
  std::vector<Mat> v_;
  double lr_ = 1e-3;
  double beta1_ = 0.9;
  double beta2_ = 0.999;
  double eps_ = 1e-8;
  long t_ = 0;
};

void zero_grad(const std::vector<Var> &params);

// target <- tau * online + (1 - tau) * target.
void soft_update(const std::vector<Var> &online, const std::vector<Var> &target, double tau);
void hard_copy(const std::vector<Var> &online, const std::vector<Var> &target);

// Throws NumericError naming `where` if any entry is NaN or infinite.
void require_finite(const Mat &m, const std::string &where);

}  // namespace uvaa::nn
