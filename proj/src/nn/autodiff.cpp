/*
 * Copyright (c) 2026, The cross authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cross/nn/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "cross/common/error.hpp"

namespace cross::nn {
namespace {

thread_local bool g_grad_enabled = true;

template <class Backward>
Var make_op(Matrix value, std::initializer_list<const Var*> inputs, Backward&& fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    bool any = false;
    for (const Var* in : inputs) any = any || in->requires_grad();
    if (any) {
      node->requires_grad = true;
      node->inputs.reserve(inputs.size());
      for (const Var* in : inputs) node->inputs.push_back(in->node());
      node->backward = std::forward<Backward>(fn);
    }
  }
  return Var(std::move(node));
}

Var make_op_n(Matrix value, std::span<const Var> inputs, std::function<void(Node&)> fn) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  if (g_grad_enabled) {
    const bool any =
        std::any_of(inputs.begin(), inputs.end(), [](const Var& v) { return v.requires_grad(); });
    if (any) {
      node->requires_grad = true;
      for (const auto& in : inputs) node->inputs.push_back(in.node());
      node->backward = std::move(fn);
    }
  }
  return Var(std::move(node));
}

Node& input(Node& self, std::size_t i) { return *self.inputs[i]; }

void check_same_shape(const Var& a, const Var& b, const char* op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw NumericalError(std::string(op) + ": shape mismatch");
  }
}

}  // namespace

bool grad_enabled() noexcept { return g_grad_enabled; }

NoGradGuard::NoGradGuard() : previous_(g_grad_enabled) { g_grad_enabled = false; }
NoGradGuard::~NoGradGuard() { g_grad_enabled = previous_; }

Var constant(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  return Var(std::move(node));
}

Var leaf(Matrix value) {
  auto node = std::make_shared<Node>();
  node->value = std::move(value);
  node->requires_grad = true;
  return Var(std::move(node));
}

Var borrowed(const Matrix& value, bool requires_grad) {
  auto node = std::make_shared<Node>();
  node->external = &value;
  node->requires_grad = requires_grad;
  return Var(std::move(node));
}

void backward(const Var& root) {
  if (root.rows() != 1 || root.cols() != 1) throw NumericalError("backward needs a scalar root");
  if (!root.requires_grad()) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<Node*> order;
  std::unordered_set<Node*> visited;
  std::vector<std::pair<Node*, std::size_t>> stack{{root.node().get(), 0}};
  visited.insert(root.node().get());
  while (!stack.empty()) {
    auto& [node, next] = stack.back();
    if (next < node->inputs.size()) {
      Node* child = node->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) stack.emplace_back(child, 0);
    } else {
      order.push_back(node);
      stack.pop_back();
    }
  }

  root.node()->accumulate(Matrix::Ones(1, 1));
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node* node = *it;
    if (node->backward && node->grad.size() != 0) node->backward(*node);
  }
}

Var matmul(const Var& a, const Var& b) {
  if (a.cols() != b.rows()) throw NumericalError("matmul: inner dimension mismatch");
  return make_op(a.value() * b.value(), {&a, &b}, [](Node& self) {
    Node& x = input(self, 0);
    Node& y = input(self, 1);
    if (x.requires_grad) x.accumulate(self.grad * y.val().transpose());
    if (y.requires_grad) y.accumulate(x.val().transpose() * self.grad);
  });
}

Var matmul_nt(const Var& a, const Var& b) {
  if (a.cols() != b.cols()) throw NumericalError("matmul_nt: inner dimension mismatch");
  return make_op(a.value() * b.value().transpose(), {&a, &b}, [](Node& self) {
    Node& x = input(self, 0);
    Node& y = input(self, 1);
    if (x.requires_grad) x.accumulate(self.grad * y.val());
    if (y.requires_grad) y.accumulate(self.grad.transpose() * x.val());
  });
}

Var add(const Var& a, const Var& b) {
  check_same_shape(a, b, "add");
  return make_op(a.value() + b.value(), {&a, &b}, [](Node& self) {
    for (auto& in : self.inputs) {
      if (in->requires_grad) in->accumulate(self.grad);
    }
  });
}

Var add_row(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw NumericalError("add_row: shape mismatch");
  Matrix out = a.value().rowwise() + row.value().row(0);
  return make_op(std::move(out), {&a, &row}, [](Node& self) {
    Node& x = input(self, 0);
    Node& r = input(self, 1);
    if (x.requires_grad) x.accumulate(self.grad);
    if (r.requires_grad) r.accumulate(self.grad.colwise().sum());
  });
}

Var mul(const Var& a, const Var& b) {
  check_same_shape(a, b, "mul");
  return make_op(a.value().cwiseProduct(b.value()), {&a, &b}, [](Node& self) {
    Node& x = input(self, 0);
    Node& y = input(self, 1);
    if (x.requires_grad) x.accumulate(self.grad.cwiseProduct(y.val()));
    if (y.requires_grad) y.accumulate(self.grad.cwiseProduct(x.val()));
  });
}

Var mul_row(const Var& a, const Var& row) {
  if (row.rows() != 1 || row.cols() != a.cols()) throw NumericalError("mul_row: shape mismatch");
  Matrix out = a.value().array().rowwise() * row.value().row(0).array();
  return make_op(std::move(out), {&a, &row}, [](Node& self) {
    Node& x = input(self, 0);
    Node& r = input(self, 1);
    if (x.requires_grad) {
      Matrix g = self.grad.array().rowwise() * r.val().row(0).array();
      x.accumulate(g);
    }
    if (r.requires_grad) r.accumulate(self.grad.cwiseProduct(x.val()).colwise().sum());
  });
}

Var scale(const Var& a, double factor) {
  return make_op(a.value() * factor, {&a}, [factor](Node& self) {
    input(self, 0).accumulate(self.grad * factor);
  });
}

Var relu(const Var& a) {
  return make_op(a.value().cwiseMax(0.0), {&a}, [](Node& self) {
    Node& x = input(self, 0);
    x.accumulate((x.val().array() > 0.0).select(self.grad, 0.0));
  });
}

Var sigmoid(const Var& a) {
  Matrix out = (1.0 + (-a.value().array()).exp()).inverse().matrix();
  return make_op(std::move(out), {&a}, [](Node& self) {
    const auto& s = self.value.array();
    input(self, 0).accumulate((self.grad.array() * s * (1.0 - s)).matrix());
  });
}

Var cos(const Var& a) {
  return make_op(a.value().array().cos().matrix(), {&a}, [](Node& self) {
    Node& x = input(self, 0);
    x.accumulate((-self.grad.array() * x.val().array().sin()).matrix());
  });
}

Var softmax_rows(const Var& a) {
  Matrix out = a.value();
  for (Index r = 0; r < out.rows(); ++r) {
    const double peak = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - peak).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  return make_op(std::move(out), {&a}, [](Node& self) {
    const Matrix& y = self.value;
    Eigen::VectorXd inner = self.grad.cwiseProduct(y).rowwise().sum();
    Matrix g = y.cwiseProduct(self.grad.colwise() - inner);
    input(self, 0).accumulate(g);
  });
}

Var layer_norm_rows(const Var& a, double eps) {
  const Matrix& x = a.value();
  const auto n = static_cast<double>(x.cols());
  Eigen::VectorXd mean = x.rowwise().mean();
  Matrix centered = x.colwise() - mean;
  Eigen::VectorXd inv_std =
      ((centered.array().square().rowwise().sum() / n) + eps).rsqrt().matrix();
  Matrix out = centered.array().colwise() * inv_std.array();
  return make_op(std::move(out), {&a}, [inv_std, n](Node& self) {
    const Matrix& xhat = self.value;
    const Matrix& g = self.grad;
    Eigen::VectorXd g_mean = g.rowwise().mean();
    Eigen::VectorXd gx_mean = g.cwiseProduct(xhat).rowwise().sum() / n;
    Matrix dx = (g.colwise() - g_mean) - (xhat.array().colwise() * gx_mean.array()).matrix();
    dx = dx.array().colwise() * inv_std.array();
    input(self, 0).accumulate(dx);
  });
}

Var mean_rows(const Var& a) {
  return make_op(a.value().colwise().mean(), {&a}, [](Node& self) {
    Node& x = input(self, 0);
    const auto rows = x.val().rows();
    x.accumulate(self.grad.replicate(rows, 1) / static_cast<double>(rows));
  });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw NumericalError("concat_cols: no inputs");
  const Index rows = parts.front().rows();
  Index cols = 0;
  for (const auto& p : parts) {
    if (p.rows() != rows) throw NumericalError("concat_cols: row count mismatch");
    cols += p.cols();
  }
  Matrix out(rows, cols);
  Index offset = 0;
  for (const auto& p : parts) {
    out.middleCols(offset, p.cols()) = p.value();
    offset += p.cols();
  }
  return make_op_n(std::move(out), parts, [](Node& self) {
    Index at = 0;
    for (auto& in : self.inputs) {
      const Index c = in->val().cols();
      if (in->requires_grad) in->accumulate(self.grad.middleCols(at, c));
      at += c;
    }
  });
}

Var concat_rows(std::span<const Var> parts) {
  if (parts.empty()) throw NumericalError("concat_rows: no inputs");
  const Index cols = parts.front().cols();
  Index rows = 0;
  for (const auto& p : parts) {
    if (p.cols() != cols) throw NumericalError("concat_rows: column count mismatch");
    rows += p.rows();
  }
  Matrix out(rows, cols);
  Index offset = 0;
  for (const auto& p : parts) {
    out.middleRows(offset, p.rows()) = p.value();
    offset += p.rows();
  }
  return make_op_n(std::move(out), parts, [](Node& self) {
    Index at = 0;
    for (auto& in : self.inputs) {
      const Index r = in->val().rows();
      if (in->requires_grad) in->accumulate(self.grad.middleRows(at, r));
      at += r;
    }
  });
}

Var slice_cols(const Var& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.cols()) {
    throw NumericalError("slice_cols: out of range");
  }
  return make_op(a.value().middleCols(start, count), {&a}, [start, count](Node& self) {
    input(self, 0).grad_storage().middleCols(start, count) += self.grad;
  });
}

Var slice_rows(const Var& a, Index start, Index count) {
  if (start < 0 || count < 0 || start + count > a.rows()) {
    throw NumericalError("slice_rows: out of range");
  }
  return make_op(a.value().middleRows(start, count), {&a}, [start, count](Node& self) {
    input(self, 0).grad_storage().middleRows(start, count) += self.grad;
  });
}

Var sum_all(const Var& a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  return make_op(std::move(out), {&a}, [](Node& self) {
    Node& x = input(self, 0);
    x.accumulate(Matrix::Constant(x.val().rows(), x.val().cols(), self.grad(0, 0)));
  });
}

Var dot_all(const Var& a, const Matrix& weights) {
  if (weights.rows() != a.rows() || weights.cols() != a.cols()) {
    throw NumericalError("dot_all: shape mismatch");
  }
  Matrix out(1, 1);
  out(0, 0) = a.value().cwiseProduct(weights).sum();
  return make_op(std::move(out), {&a}, [weights](Node& self) {
    input(self, 0).accumulate(weights * self.grad(0, 0));
  });
}

Var gather_rows(const Var& a, std::span<const Index> indices) {
  std::vector<Index> idx(indices.begin(), indices.end());
  Matrix out(static_cast<Index>(idx.size()), a.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= a.rows()) throw NumericalError("gather_rows: index out of range");
    out.row(static_cast<Index>(i)) = a.value().row(idx[i]);
  }
  return make_op(std::move(out), {&a}, [idx = std::move(idx)](Node& self) {
    Matrix& g = input(self, 0).grad_storage();
    for (std::size_t i = 0; i < idx.size(); ++i) g.row(idx[i]) += self.grad.row(static_cast<Index>(i));
  });
}

Var replace_rows(const Var& a, std::span<const Index> indices, const Var& rows) {
  if (rows.rows() != static_cast<Index>(indices.size()) || rows.cols() != a.cols()) {
    throw NumericalError("replace_rows: shape mismatch");
  }
  std::vector<Index> idx(indices.begin(), indices.end());
  Matrix out = a.value();
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (idx[i] < 0 || idx[i] >= a.rows()) throw NumericalError("replace_rows: index out of range");
    out.row(idx[i]) = rows.value().row(static_cast<Index>(i));
  }
  return make_op(std::move(out), {&a, &rows}, [idx = std::move(idx)](Node& self) {
    Node& base = input(self, 0);
    Node& src = input(self, 1);
    if (base.requires_grad) {
      Matrix g = self.grad;
      for (Index r : idx) g.row(r).setZero();
      base.accumulate(g);
    }
    if (src.requires_grad) {
      Matrix g(static_cast<Index>(idx.size()), self.grad.cols());
      for (std::size_t i = 0; i < idx.size(); ++i) g.row(static_cast<Index>(i)) = self.grad.row(idx[i]);
      src.accumulate(g);
    }
  });
}

Var scale_rows(const Var& a, const Eigen::VectorXd& factors) {
  if (factors.size() != a.rows()) throw NumericalError("scale_rows: shape mismatch");
  Matrix out = a.value().array().colwise() * factors.array();
  return make_op(std::move(out), {&a}, [factors](Node& self) {
    input(self, 0).accumulate((self.grad.array().colwise() * factors.array()).matrix());
  });
}

namespace {

void check_offsets(std::span<const Index> offsets, Index rows, const char* op) {
  if (offsets.empty() || offsets.front() != 0 || offsets.back() != rows) {
    throw NumericalError(std::string(op) + ": offsets do not cover the rows");
  }
  for (std::size_t s = 1; s < offsets.size(); ++s) {
    if (offsets[s] < offsets[s - 1]) throw NumericalError(std::string(op) + ": offsets decrease");
  }
}

}  // namespace

Var segment_mean(const Var& a, std::span<const Index> offsets) {
  check_offsets(offsets, a.rows(), "segment_mean");
  std::vector<Index> off(offsets.begin(), offsets.end());
  const auto segments = static_cast<Index>(off.size() - 1);
  Matrix out(segments, a.cols());
  for (Index s = 0; s < segments; ++s) {
    const Index n = off[s + 1] - off[s];
    if (n == 0) throw NumericalError("segment_mean: empty segment");
    out.row(s) = a.value().middleRows(off[s], n).colwise().mean();
  }
  return make_op(std::move(out), {&a}, [off = std::move(off)](Node& self) {
    Node& x = input(self, 0);
    Matrix g(x.val().rows(), x.val().cols());
    for (std::size_t s = 0; s + 1 < off.size(); ++s) {
      const Index n = off[s + 1] - off[s];
      g.middleRows(off[s], n) =
          self.grad.row(static_cast<Index>(s)).replicate(n, 1) / static_cast<double>(n);
    }
    x.accumulate(g);
  });
}

Var segment_attention(const Var& q, const Var& k, const Var& v,
                      std::span<const Index> q_offsets, std::span<const Index> kv_offsets,
                      double scale, std::vector<Matrix>* weights) {
  check_offsets(q_offsets, q.rows(), "segment_attention");
  check_offsets(kv_offsets, k.rows(), "segment_attention");
  if (q_offsets.size() != kv_offsets.size() || k.rows() != v.rows() || q.cols() != k.cols()) {
    throw NumericalError("segment_attention: shape mismatch");
  }
  std::vector<Index> qo(q_offsets.begin(), q_offsets.end());
  std::vector<Index> ko(kv_offsets.begin(), kv_offsets.end());
  const std::size_t segments = qo.size() - 1;
  std::vector<Matrix> probs(segments);
  Matrix out = Matrix::Zero(q.rows(), v.cols());
  for (std::size_t s = 0; s < segments; ++s) {
    const Index nq = qo[s + 1] - qo[s];
    const Index nk = ko[s + 1] - ko[s];
    if (nq == 0 || nk == 0) {
      probs[s].resize(nq, nk);
      continue;
    }
    Matrix scores = q.value().middleRows(qo[s], nq) * k.value().middleRows(ko[s], nk).transpose();
    scores *= scale;
    for (Index r = 0; r < nq; ++r) {
      const double peak = scores.row(r).maxCoeff();
      scores.row(r) = (scores.row(r).array() - peak).exp().matrix();
      scores.row(r) /= scores.row(r).sum();
    }
    out.middleRows(qo[s], nq) = scores * v.value().middleRows(ko[s], nk);
    probs[s] = std::move(scores);
  }
  if (weights) *weights = probs;
  return make_op(std::move(out), {&q, &k, &v},
                 [qo = std::move(qo), ko = std::move(ko), probs = std::move(probs),
                  scale](Node& self) {
                   Node& qn = input(self, 0);
                   Node& kn = input(self, 1);
                   Node& vn = input(self, 2);
                   Matrix gq = Matrix::Zero(qn.val().rows(), qn.val().cols());
                   Matrix gk = Matrix::Zero(kn.val().rows(), kn.val().cols());
                   Matrix gv = Matrix::Zero(vn.val().rows(), vn.val().cols());
                   for (std::size_t s = 0; s + 1 < qo.size(); ++s) {
                     const Index nq = qo[s + 1] - qo[s];
                     const Index nk = ko[s + 1] - ko[s];
                     if (nq == 0 || nk == 0) continue;
                     const Matrix& p = probs[s];
                     const auto go = self.grad.middleRows(qo[s], nq);
                     gv.middleRows(ko[s], nk) += p.transpose() * go;
                     Matrix gp = go * vn.val().middleRows(ko[s], nk).transpose();
                     Eigen::VectorXd inner = gp.cwiseProduct(p).rowwise().sum();
                     Matrix gs = p.cwiseProduct(gp.colwise() - inner) * scale;
                     gq.middleRows(qo[s], nq) += gs * kn.val().middleRows(ko[s], nk);
                     gk.middleRows(ko[s], nk) += gs.transpose() * qn.val().middleRows(qo[s], nq);
                   }
                   if (qn.requires_grad) qn.accumulate(gq);
                   if (kn.requires_grad) kn.accumulate(gk);
                   if (vn.requires_grad) vn.accumulate(gv);
                 });
}

Var pack_segments(const Var& a, std::span<const Index> offsets, Index slots) {
  check_offsets(offsets, a.rows(), "pack_segments");
  std::vector<Index> off(offsets.begin(), offsets.end());
  const auto segments = static_cast<Index>(off.size() - 1);
  const Index cols = a.cols();
  Matrix out = Matrix::Zero(segments, slots * cols);
  for (Index s = 0; s < segments; ++s) {
    const Index n = off[s + 1] - off[s];
    if (n > slots) throw NumericalError("pack_segments: segment longer than slot count");
    for (Index r = 0; r < n; ++r) out.block(s, r * cols, 1, cols) = a.value().row(off[s] + r);
  }
  return make_op(std::move(out), {&a}, [off = std::move(off), cols](Node& self) {
    Node& x = input(self, 0);
    Matrix g(x.val().rows(), cols);
    for (std::size_t s = 0; s + 1 < off.size(); ++s) {
      for (Index r = 0; r < off[s + 1] - off[s]; ++r) {
        g.row(off[s] + r) = self.grad.block(static_cast<Index>(s), r * cols, 1, cols);
      }
    }
    x.accumulate(g);
  });
}

Var unpack_segments(const Var& packed, std::span<const Index> offsets, Index cols) {
  if (offsets.empty() || static_cast<Index>(offsets.size() - 1) != packed.rows() || cols < 1 ||
      packed.cols() % cols != 0) {
    throw NumericalError("unpack_segments: shape mismatch");
  }
  std::vector<Index> off(offsets.begin(), offsets.end());
  const Index slots = packed.cols() / cols;
  Matrix out(off.back(), cols);
  for (std::size_t s = 0; s + 1 < off.size(); ++s) {
    const Index n = off[s + 1] - off[s];
    if (n > slots) throw NumericalError("unpack_segments: segment longer than slot count");
    for (Index r = 0; r < n; ++r) {
      out.row(off[s] + r) = packed.value().block(static_cast<Index>(s), r * cols, 1, cols);
    }
  }
  return make_op(std::move(out), {&packed}, [off = std::move(off), cols](Node& self) {
    Node& x = input(self, 0);
    Matrix g = Matrix::Zero(x.val().rows(), x.val().cols());
    for (std::size_t s = 0; s + 1 < off.size(); ++s) {
      for (Index r = 0; r < off[s + 1] - off[s]; ++r) {
        g.block(static_cast<Index>(s), r * cols, 1, cols) = self.grad.row(off[s] + r);
      }
    }
    x.accumulate(g);
  });
}

Var binary_cross_entropy(const Var& p, const Matrix& targets, double eps) {
  if (targets.rows() != p.rows() || targets.cols() != p.cols()) {
    throw NumericalError("binary_cross_entropy: shape mismatch");
  }
  const Matrix& prob = p.value();
  double loss = 0.0;
  for (Index i = 0; i < prob.size(); ++i) {
    const double q = std::clamp(prob(i), eps, 1.0 - eps);
    const double y = targets(i);
    loss -= y * std::log(q) + (1.0 - y) * std::log(1.0 - q);
  }
  Matrix out(1, 1);
  out(0, 0) = loss;
  return make_op(std::move(out), {&p}, [targets, eps](Node& self) {
    Node& x = input(self, 0);
    const Matrix& prob = x.val();
    Matrix g(prob.rows(), prob.cols());
    for (Index i = 0; i < prob.size(); ++i) {
      const double q = prob(i);
      const double y = targets(i);
      g(i) = (q < eps || q > 1.0 - eps) ? 0.0 : (-y / q + (1.0 - y) / (1.0 - q));
    }
    x.accumulate(g * self.grad(0, 0));
  });
}

}  // namespace cross::nn
