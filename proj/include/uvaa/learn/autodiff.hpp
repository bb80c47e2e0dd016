// SPDX-License-Identifier: Apache-2.0
//
// Small reverse-mode automatic differentiation over dense Eigen matrices.
// Rows are batch entries, columns are features. A Var is a shared handle to a
// graph node; parameters are leaf Vars created with requires_grad = true and
// keep accumulating gradients until zero_grad().

#pragma once

#include <functional>
#include <memory>
#include <vector>

#include <Eigen/Dense>

namespace uvaa::ad {

using Mat = Eigen::MatrixXd;

struct Node {
  Mat value;
  Mat grad;  // empty until something flows into it
  bool requires_grad = false;
  std::vector<std::shared_ptr<Node>> parents;
  std::function<void(Node &)> backward;

  void accumulate(const Mat &g);
};

class Var {
 public:
  Var() = default;
  explicit Var(Mat value, bool requires_grad = false);
  explicit Var(std::shared_ptr<Node> node) : n_(std::move(node)) {}

  const Mat &value() const { return n_->value; }
  Mat &value() { return n_->value; }
  const Mat &grad() const { return n_->grad; }
  bool requires_grad() const { return n_->requires_grad; }
  Eigen::Index rows() const { return n_->value.rows(); }
  Eigen::Index cols() const { return n_->value.cols(); }
  double item() const { return n_->value(0, 0); }
  void zero_grad() { n_->grad.resize(0, 0); }
  bool valid() const { return static_cast<bool>(n_); }
  const std::shared_ptr<Node> &node() const { return n_; }

 private:
  std::shared_ptr<Node> n_;
};

Var param(Mat value);
Var constant(Mat value);

bool grad_enabled();

// Disables graph construction in the enclosing scope.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard &) = delete;
  NoGradGuard &operator=(const NoGradGuard &) = delete;

 private:
  bool prev_;
};

// Seeds d(root)/d(root) = 1 for a 1x1 root and propagates to every node
// that requires a gradient.
void backward(const Var &root);

Var matmul(const Var &a, const Var &b);
Var add(const Var &a, const Var &b);
Var add_row(const Var &a, const Var &row);  // row is 1 x cols, broadcast down
Var sub(const Var &a, const Var &b);
Var mul(const Var &a, const Var &b);
Var div(const Var &a, const Var &b);
Var scale(const Var &a, double s);
Var add_scalar(const Var &a, double s);
Var neg(const Var &a);

Var relu(const Var &a);
Var tanh(const Var &a);
Var exp(const Var &a);
Var log(const Var &a);
Var softplus(const Var &a);
Var square(const Var &a);
Var clamp(const Var &a, double lo, double hi);

Var sum(const Var &a);      // 1 x 1
Var mean(const Var &a);     // 1 x 1
Var row_sum(const Var &a);  // rows x 1
Var mul_col(const Var &a, const Var &col);  // col is rows x 1, broadcast across
Var softmax_rows(const Var &a);

Var concat_cols(const std::vector<Var> &parts);
Var slice_cols(const Var &a, Eigen::Index start, Eigen::Index count);

}  // namespace uvaa::ad
