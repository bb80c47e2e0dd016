// SPDX-License-Identifier: Apache-2.0

#include "uvaa/learn/nn.hpp"

#include <cmath>
#include <stdexcept>

#include "uvaa/types.hpp"

namespace uvaa::nn {

std::vector<Var> values_of(const NamedParams &p) {
  std::vector<Var> out;
  out.reserve(p.size());
  for (const auto &kv : p) out.push_back(kv.second);
  return out;
}

void append(NamedParams &out, const std::string &prefix, const NamedParams &in) {
  for (const auto &[name, v] : in) out.emplace_back(prefix + "." + name, v);
}

namespace {

Mat uniform_init(int rows, int cols, double bound, Rng &rng) {
  Mat m(rows, cols);
  // Column-major fill order is part of the reproducibility contract.
  for (int c = 0; c < cols; ++c) {
    for (int r = 0; r < rows; ++r) m(r, c) = rng.uniform(-bound, bound);
  }
  return m;
}

}  // namespace

Linear::Linear(int in, int out, Rng &rng) {
  if (in <= 0 || out <= 0) throw std::invalid_argument("Linear: sizes must be positive");
  const double bound = 1.0 / std::sqrt(static_cast<double>(in));
  w_ = ad::param(uniform_init(in, out, bound, rng));
  b_ = ad::param(uniform_init(1, out, bound, rng));
}

Var Linear::forward(const Var &x) const { return ad::add_row(ad::matmul(x, w_), b_); }

Mlp::Mlp(const std::vector<int> &sizes, Rng &rng) {
  if (sizes.size() < 2) throw std::invalid_argument("Mlp: need at least input and output sizes");
  for (std::size_t i = 0; i + 1 < sizes.size(); ++i) layers_.emplace_back(sizes[i], sizes[i + 1], rng);
}

Var Mlp::forward(const Var &x) const {
  Var h = x;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    h = layers_[i].forward(h);
    if (i + 1 < layers_.size()) h = ad::relu(h);
  }
  return h;
}

NamedParams Mlp::parameters() const {
  NamedParams out;
  for (std::size_t i = 0; i < layers_.size(); ++i) append(out, "l" + std::to_string(i), layers_[i].parameters());
  return out;
}

Adam::Adam(std::vector<Var> params, double lr, double beta1, double beta2, double eps)
    : params_(std::move(params)), lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto &p : params_) {
    m_.push_back(Mat::Zero(p.rows(), p.cols()));
    v_.push_back(Mat::Zero(p.rows(), p.cols()));
  }
}

void Adam::step() {
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params_.size(); ++i) {
    Var &p = params_[i];
    if (p.grad().size() == 0) continue;
    const Mat &g = p.grad();
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * g;
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * g.cwiseProduct(g);
    p.value().array() -= lr_ * (m_[i].array() / c1) / ((v_[i].array() / c2).sqrt() + eps_);
  }
  zero_grad();
}

void Adam::zero_grad() { nn::zero_grad(params_); }

void zero_grad(const std::vector<Var> &params) {
  for (auto p : params) p.zero_grad();
}

void soft_update(const std::vector<Var> &online, const std::vector<Var> &target, double tau) {
  if (online.size() != target.size()) throw std::invalid_argument("soft_update: parameter count mismatch");
  for (std::size_t i = 0; i < online.size(); ++i) {
    if (online[i].rows() != target[i].rows() || online[i].cols() != target[i].cols()) {
      throw std::invalid_argument("soft_update: shape mismatch");
    }
    Var t = target[i];
    t.value() = tau * online[i].value() + (1.0 - tau) * t.value();
  }
}

void hard_copy(const std::vector<Var> &online, const std::vector<Var> &target) { soft_update(online, target, 1.0); }

void require_finite(const Mat &m, const std::string &where) {
  if (!m.allFinite()) throw NumericError("non-finite value in " + where);
}

}  // namespace uvaa::nn
