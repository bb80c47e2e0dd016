// SPDX-License-Identifier: Apache-2.0

#include "uvaa/learn/autodiff.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_set>

namespace uvaa::ad {

namespace {

thread_local bool g_grad_enabled = true;

void check_same_shape(const Var &a, const Var &b, const char *op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(std::string(op) + ": shape mismatch");
  }
}

Var make(Mat value, std::vector<std::shared_ptr<Node>> parents, std::function<void(Node &)> bw) {
  auto n = std::make_shared<Node>();
  n->value = std::move(value);
  bool need = false;
  if (g_grad_enabled) {
    for (const auto &p : parents) need = need || p->requires_grad;
  }
  if (need) {
    n->requires_grad = true;
    n->parents = std::move(parents);
    n->backward = std::move(bw);
  }
  return Var(std::move(n));
}

inline void push(Node &p, const Mat &g) {
  if (p.requires_grad) p.accumulate(g);
}

}  // namespace

void Node::accumulate(const Mat &g) {
  if (grad.size() == 0) {
    grad = g;
  } else {
    grad += g;
  }
}

Var::Var(Mat value, bool requires_grad) : n_(std::make_shared<Node>()) {
  n_->value = std::move(value);
  n_->requires_grad = requires_grad;
}

Var param(Mat value) { return Var(std::move(value), true); }
Var constant(Mat value) { return Var(std::move(value), false); }

bool grad_enabled() { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : prev_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = prev_; }

void backward(const Var &root) {
  if (root.rows() != 1 || root.cols() != 1) throw std::invalid_argument("backward: root must be 1x1");
  if (!root.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node *> order;
  std::unordered_set<Node *> seen;
  std::vector<std::pair<Node *, std::size_t>> stack{{root.node().get(), 0}};
  seen.insert(root.node().get());
  while (!stack.empty()) {
    auto &[node, next] = stack.back();
    if (next < node->parents.size()) {
      Node *p = node->parents[next++].get();
      if (p->requires_grad && !seen.count(p)) {
        seen.insert(p);
        stack.emplace_back(p, 0);
      }
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->accumulate(Mat::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node *n = *it;
    if (n->backward && n->grad.size() != 0) n->backward(*n);
  }
}

Var matmul(const Var &a, const Var &b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matmul: inner dimension mismatch");
  return make(a.value() * b.value(), {a.node(), b.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    Node &B = *n.parents[1];
    if (A.requires_grad) A.accumulate(n.grad * B.value.transpose());
    if (B.requires_grad) B.accumulate(A.value.transpose() * n.grad);
  });
}

Var add(const Var &a, const Var &b) {
  check_same_shape(a, b, "add");
  return make(a.value() + b.value(), {a.node(), b.node()}, [](Node &n) {
    push(*n.parents[0], n.grad);
    push(*n.parents[1], n.grad);
  });
}

Var add_row(const Var &a, const Var &row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw std::invalid_argument("add_row: shape mismatch");
  Mat v = a.value().rowwise() + row.value().row(0);
  return make(std::move(v), {a.node(), row.node()}, [](Node &n) {
    push(*n.parents[0], n.grad);
    push(*n.parents[1], n.grad.colwise().sum());
  });
}

Var sub(const Var &a, const Var &b) {
  check_same_shape(a, b, "sub");
  return make(a.value() - b.value(), {a.node(), b.node()}, [](Node &n) {
    push(*n.parents[0], n.grad);
    push(*n.parents[1], -n.grad);
  });
}

Var mul(const Var &a, const Var &b) {
  check_same_shape(a, b, "mul");
  return make(a.value().cwiseProduct(b.value()), {a.node(), b.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    Node &B = *n.parents[1];
    if (A.requires_grad) A.accumulate(n.grad.cwiseProduct(B.value));
    if (B.requires_grad) B.accumulate(n.grad.cwiseProduct(A.value));
  });
}

Var div(const Var &a, const Var &b) {
  check_same_shape(a, b, "div");
  return make(a.value().cwiseQuotient(b.value()), {a.node(), b.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    Node &B = *n.parents[1];
    if (A.requires_grad) A.accumulate(n.grad.cwiseQuotient(B.value));
    if (B.requires_grad) {
      B.accumulate(-n.grad.cwiseProduct(A.value).cwiseQuotient(B.value.cwiseProduct(B.value)));
    }
  });
}

Var scale(const Var &a, double s) {
  return make(a.value() * s, {a.node()}, [s](Node &n) { push(*n.parents[0], n.grad * s); });
}

Var add_scalar(const Var &a, double s) {
  return make(a.value().array() + s, {a.node()}, [](Node &n) { push(*n.parents[0], n.grad); });
}

Var neg(const Var &a) { return scale(a, -1.0); }

Var relu(const Var &a) {
  return make(a.value().cwiseMax(0.0), {a.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    A.accumulate((A.value.array() > 0.0).cast<double>().matrix().cwiseProduct(n.grad));
  });
}

Var tanh(const Var &a) {
  return make(a.value().array().tanh().matrix(), {a.node()}, [](Node &n) {
    n.parents[0]->accumulate(n.grad.cwiseProduct((1.0 - n.value.array().square()).matrix()));
  });
}

Var exp(const Var &a) {
  return make(a.value().array().exp().matrix(), {a.node()},
              [](Node &n) { n.parents[0]->accumulate(n.grad.cwiseProduct(n.value)); });
}

Var log(const Var &a) {
  return make(a.value().array().log().matrix(), {a.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    A.accumulate(n.grad.cwiseQuotient(A.value));
  });
}

Var softplus(const Var &a) {
  // max(x, 0) + log1p(exp(-|x|))
  Mat v = a.value().unaryExpr([](double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); });
  return make(std::move(v), {a.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    Mat sig = A.value.unaryExpr([](double x) {
      return x >= 0.0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
    });
    A.accumulate(n.grad.cwiseProduct(sig));
  });
}

Var square(const Var &a) {
  return make(a.value().array().square().matrix(), {a.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    A.accumulate(2.0 * n.grad.cwiseProduct(A.value));
  });
}

Var clamp(const Var &a, double lo, double hi) {
  return make(a.value().cwiseMax(lo).cwiseMin(hi), {a.node()}, [lo, hi](Node &n) {
    Node &A = *n.parents[0];
    Mat mask = A.value.unaryExpr([lo, hi](double x) { return (x >= lo && x <= hi) ? 1.0 : 0.0; });
    A.accumulate(n.grad.cwiseProduct(mask));
  });
}

Var sum(const Var &a) {
  Mat v(1, 1);
  v(0, 0) = a.value().sum();
  return make(std::move(v), {a.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    A.accumulate(Mat::Constant(A.value.rows(), A.value.cols(), n.grad(0, 0)));
  });
}

Var mean(const Var &a) {
  const double count = static_cast<double>(a.value().size());
  return scale(sum(a), 1.0 / count);
}

Var row_sum(const Var &a) {
  return make(a.value().rowwise().sum(), {a.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    A.accumulate(n.grad.replicate(1, A.value.cols()));
  });
}

Var mul_col(const Var &a, const Var &col) {
  if (col.cols() != 1 || col.rows() != a.rows()) throw std::invalid_argument("mul_col: shape mismatch");
  Mat v = a.value().array().colwise() * col.value().col(0).array();
  return make(std::move(v), {a.node(), col.node()}, [](Node &n) {
    Node &A = *n.parents[0];
    Node &C = *n.parents[1];
    if (A.requires_grad) A.accumulate((n.grad.array().colwise() * C.value.col(0).array()).matrix());
    if (C.requires_grad) C.accumulate(n.grad.cwiseProduct(A.value).rowwise().sum());
  });
}

Var softmax_rows(const Var &a) {
  Mat v = a.value();
  for (Eigen::Index r = 0; r < v.rows(); ++r) {
    const double top = v.row(r).maxCoeff();
    v.row(r) = (v.row(r).array() - top).exp().matrix();
    v.row(r) /= v.row(r).sum();
  }
  return make(std::move(v), {a.node()}, [](Node &n) {
    Mat dot = n.grad.cwiseProduct(n.value).rowwise().sum();
    Mat g = n.value.cwiseProduct((n.grad.colwise() - dot.col(0)));
    n.parents[0]->accumulate(g);
  });
}

Var concat_cols(const std::vector<Var> &parts) {
  if (parts.empty()) throw std::invalid_argument("concat_cols: no inputs");
  const Eigen::Index rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto &p : parts) {
    if (p.rows() != rows) throw std::invalid_argument("concat_cols: row mismatch");
    cols += p.cols();
  }
  Mat v(rows, cols);
  std::vector<std::shared_ptr<Node>> parents;
  Eigen::Index at = 0;
  for (const auto &p : parts) {
    v.middleCols(at, p.cols()) = p.value();
    at += p.cols();
    parents.push_back(p.node());
  }
  return make(std::move(v), std::move(parents), [](Node &n) {
    Eigen::Index off = 0;
    for (auto &p : n.parents) {
      const Eigen::Index c = p->value.cols();
      if (p->requires_grad) p->accumulate(n.grad.middleCols(off, c));
      off += c;
    }
  });
}

Var slice_cols(const Var &a, Eigen::Index start, Eigen::Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) throw std::invalid_argument("slice_cols: out of range");
  return make(a.value().middleCols(start, count), {a.node()}, [start, count](Node &n) {
    Node &A = *n.parents[0];
    Mat g = Mat::Zero(A.value.rows(), A.value.cols());
    g.middleCols(start, count) = n.grad;
    A.accumulate(g);
  });
}

}  // namespace uvaa::ad
