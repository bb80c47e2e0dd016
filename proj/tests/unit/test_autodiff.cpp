// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>

#include "test_util.hpp"
#include "uvaa/learn/autodiff.hpp"
#include "uvaa/rng.hpp"

using namespace uvaa;
using namespace uvaa::ad;
using uvaa::testing::check_gradients;

namespace {

Mat random_mat(int r, int c, Rng &rng, double lo = -1.0, double hi = 1.0) {
  Mat m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
  return m;
}

// Values kept away from 0 so kinked ops are differentiable at the sample.
Mat away_from_zero(int r, int c, Rng &rng) {
  Mat m = random_mat(r, c, rng, 0.2, 1.0);
  for (Eigen::Index i = 0; i < m.size(); ++i) {
    if (rng.uniform() < 0.5) m.data()[i] = -m.data()[i];
  }
  return m;
}

void expect_ok(const uvaa::testing::GradCheck &g) {
  EXPECT_GT(g.checked, 0u);
  EXPECT_LE(g.worst, 1.0) << g.where;
}

}  // namespace

TEST(Autodiff, MatmulAndAdd) {
  Rng rng(1);
  Var a = param(random_mat(3, 4, rng));
  Var b = param(random_mat(4, 2, rng));
  Var c = param(random_mat(3, 2, rng));
  Var row = param(random_mat(1, 2, rng));
  expect_ok(check_gradients([&] { return sum(square(add_row(add(matmul(a, b), c), row))); }, {a, b, c, row}));
}

TEST(Autodiff, ElementwiseArithmetic) {
  Rng rng(2);
  Var a = param(random_mat(2, 3, rng));
  Var b = param(random_mat(2, 3, rng, 0.5, 2.0));
  expect_ok(check_gradients(
      [&] { return sum(add_scalar(scale(sub(mul(a, b), div(a, b)), 1.7), 0.3)); }, {a, b}));
  expect_ok(check_gradients([&] { return mean(neg(square(a))); }, {a}));
}

TEST(Autodiff, Nonlinearities) {
  Rng rng(3);
  Var a = param(away_from_zero(3, 3, rng));
  Var pos = param(random_mat(3, 3, rng, 0.5, 2.0));
  expect_ok(check_gradients([&] { return sum(mul(relu(a), a)); }, {a}));
  expect_ok(check_gradients([&] { return sum(tanh(a)); }, {a}));
  expect_ok(check_gradients([&] { return sum(exp(a)); }, {a}));
  expect_ok(check_gradients([&] { return sum(log(pos)); }, {pos}));
  expect_ok(check_gradients([&] { return sum(softplus(scale(a, 3.0))); }, {a}));
  expect_ok(check_gradients([&] { return sum(square(clamp(a, -0.5, 0.5))); }, {a}));
}

TEST(Autodiff, SoftplusStableForLargeInputs) {
  Var a = param(Mat::Constant(1, 2, 800.0));
  a.value()(0, 1) = -800.0;
  Var y = softplus(a);
  EXPECT_DOUBLE_EQ(y.value()(0, 0), 800.0);
  EXPECT_NEAR(y.value()(0, 1), 0.0, 1e-300);
  backward(sum(y));
  EXPECT_DOUBLE_EQ(a.grad()(0, 0), 1.0);
  EXPECT_NEAR(a.grad()(0, 1), 0.0, 1e-300);
}

TEST(Autodiff, Reductions) {
  Rng rng(4);
  Var a = param(random_mat(4, 3, rng));
  Var col = param(random_mat(4, 1, rng));
  expect_ok(check_gradients([&] { return sum(square(row_sum(a))); }, {a}));
  expect_ok(check_gradients([&] { return sum(square(mul_col(a, col))); }, {a, col}));
}

TEST(Autodiff, SoftmaxRows) {
  Rng rng(5);
  Var a = param(random_mat(3, 4, rng, -2.0, 2.0));
  Var w = constant(random_mat(3, 4, rng));
  Var s = softmax_rows(a);
  for (int r = 0; r < 3; ++r) EXPECT_NEAR(s.value().row(r).sum(), 1.0, 1e-14);
  expect_ok(check_gradients([&] { return sum(mul(softmax_rows(a), w)); }, {a}));
}

TEST(Autodiff, ConcatAndSlice) {
  Rng rng(6);
  Var a = param(random_mat(2, 3, rng));
  Var b = param(random_mat(2, 2, rng));
  Var c = concat_cols({a, b});
  EXPECT_EQ(c.cols(), 5);
  EXPECT_EQ(slice_cols(c, 3, 2).value(), b.value());
  expect_ok(check_gradients(
      [&] {
        Var x = concat_cols({a, b});
        return sum(square(mul(slice_cols(x, 1, 3), slice_cols(x, 0, 3))));
      },
      {a, b}));
}

TEST(Autodiff, SharedSubexpressionAccumulates) {
  Var a = param(Mat::Constant(1, 1, 3.0));
  Var y = add(mul(a, a), a);
  backward(y);
  EXPECT_DOUBLE_EQ(a.grad()(0, 0), 7.0);
}

TEST(Autodiff, NoGradGuardBuildsNoGraph) {
  Var a = param(Mat::Constant(1, 1, 2.0));
  {
    NoGradGuard g;
    EXPECT_FALSE(grad_enabled());
    Var y = mul(a, a);
    EXPECT_FALSE(y.node()->requires_grad);
    EXPECT_DOUBLE_EQ(y.item(), 4.0);
  }
  EXPECT_TRUE(grad_enabled());
}

TEST(Autodiff, ConstantsReceiveNoGradient) {
  Var a = param(Mat::Constant(1, 1, 2.0));
  Var k = constant(Mat::Constant(1, 1, 5.0));
  backward(mul(a, k));
  EXPECT_DOUBLE_EQ(a.grad()(0, 0), 5.0);
  EXPECT_EQ(k.grad().size(), 0);
}
