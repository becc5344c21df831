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

#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace cross::nn {

using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// One vertex of a reverse-mode computation graph.
struct Node {
  Matrix value;
  const Matrix* external = nullptr;  // borrowed value (parameters), never owned
  Matrix grad;                       // empty until something flows in
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node&)> backward;
  bool requires_grad = false;

  [[nodiscard]] const Matrix& val() const noexcept { return external ? *external : value; }

  /// grad, zero-initialized to the value's shape on first use.
  Matrix& grad_storage() {
    if (grad.size() == 0) grad = Matrix::Zero(val().rows(), val().cols());
    return grad;
  }

  template <class Expr>
  void accumulate(const Eigen::MatrixBase<Expr>& g) {
    if (grad.size() == 0) {
      grad = g;
    } else {
      grad += g;
    }
  }
};

/// Handle to a graph node. Copies share the node.
class Var {
 public:
  Var() = default;
  explicit Var(std::shared_ptr<Node> node) : node_(std::move(node)) {}

  [[nodiscard]] const Matrix& value() const { return node_->val(); }
  /// Gradient after backward(); empty if nothing reached this node.
  [[nodiscard]] const Matrix& grad() const { return node_->grad; }
  [[nodiscard]] Index rows() const { return value().rows(); }
  [[nodiscard]] Index cols() const { return value().cols(); }
  [[nodiscard]] bool requires_grad() const { return node_ && node_->requires_grad; }
  [[nodiscard]] double scalar() const { return value()(0, 0); }
  [[nodiscard]] const std::shared_ptr<Node>& node() const { return node_; }
  [[nodiscard]] bool defined() const { return static_cast<bool>(node_); }

 private:
  std::shared_ptr<Node> node_;
};

/// Whether new ops record their inputs for backward (per thread).
[[nodiscard]] bool grad_enabled() noexcept;

class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

Var constant(Matrix value);
Var leaf(Matrix value);
/// Borrows `value`, which must outlive the graph.
Var borrowed(const Matrix& value, bool requires_grad);

/// Seeds d(root)/d(root) = 1 and propagates to every reachable node. `root` must be 1x1.
void backward(const Var& root);

// Linear algebra
Var matmul(const Var& a, const Var& b);
Var matmul_nt(const Var& a, const Var& b);  // a * b^T
Var add(const Var& a, const Var& b);
Var add_row(const Var& a, const Var& row);  // broadcast a 1xn row over a's rows
Var mul(const Var& a, const Var& b);        // elementwise
Var mul_row(const Var& a, const Var& row);
Var scale(const Var& a, double factor);

// Elementwise nonlinearities
Var relu(const Var& a);
Var sigmoid(const Var& a);
Var cos(const Var& a);

// Row-wise ops
Var softmax_rows(const Var& a);
Var layer_norm_rows(const Var& a, double eps = 1e-5);  // no affine part
Var mean_rows(const Var& a);                            // 1 x cols

// Shape ops
Var concat_cols(std::span<const Var> parts);
Var concat_rows(std::span<const Var> parts);
Var slice_cols(const Var& a, Index start, Index count);
Var slice_rows(const Var& a, Index start, Index count);

// Reductions and losses
Var sum_all(const Var& a);
Var dot_all(const Var& a, const Matrix& weights);  // sum(a .* weights)
// Segmented ops. `offsets` has one more entry than there are segments and
// segment s covers rows [offsets[s], offsets[s+1]).

/// Rows of `a` at `indices`, in order; repeats allowed.
Var gather_rows(const Var& a, std::span<const Index> indices);
/// `a` with row indices[i] replaced by row i of `rows`. Indices must be distinct.
Var replace_rows(const Var& a, std::span<const Index> indices, const Var& rows);
/// Multiplies row i of `a` by factors(i).
Var scale_rows(const Var& a, const Eigen::VectorXd& factors);
/// Per-segment row mean; one output row per segment. Segments must be non-empty.
Var segment_mean(const Var& a, std::span<const Index> offsets);
/// Scaled dot-product attention where query segment s attends only to key/value
/// segment s. A query segment whose key segment is empty gets zero rows. When
/// `weights` is given it receives the softmax matrix of every segment.
Var segment_attention(const Var& q, const Var& k, const Var& v,
                      std::span<const Index> q_offsets, std::span<const Index> kv_offsets,
                      double scale, std::vector<Matrix>* weights = nullptr);
/// Flattens each segment row-major into one row of width slots * cols,
/// zero-padding segments shorter than `slots`.
Var pack_segments(const Var& a, std::span<const Index> offsets, Index slots);
/// Inverse of pack_segments: drops the padding and restacks the segments.
Var unpack_segments(const Var& packed, std::span<const Index> offsets, Index cols);

/// Summed binary cross-entropy of probabilities `p` against 0/1 `targets`.
/// Probabilities are clamped to [eps, 1 - eps]; clamped entries get no gradient.
Var binary_cross_entropy(const Var& p, const Matrix& targets, double eps = 1e-7);

}  // namespace cross::nn
