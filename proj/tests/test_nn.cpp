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

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "cross/common/error.hpp"
#include "cross/nn/adam.hpp"
#include "cross/nn/autodiff.hpp"
#include "cross/nn/layers.hpp"
#include "gradcheck.hpp"

namespace cross::nn {
namespace {

using testing::check_inputs;
using testing::random_matrix;

constexpr double kTol = 1e-6;

/// Projects any matrix to a scalar with fixed, non-uniform weights so every
/// output entry gets a distinct upstream gradient.
Var project(const Var& v) {
  Matrix w(v.rows(), v.cols());
  for (Index i = 0; i < w.size(); ++i) w.data()[i] = std::sin(1.0 + 0.7 * static_cast<double>(i));
  return dot_all(v, w);
}

class OpGrad : public ::testing::Test {
 protected:
  std::mt19937_64 rng{42};
};

TEST_F(OpGrad, Matmul) {
  auto r = check_inputs({random_matrix(3, 4, rng), random_matrix(4, 2, rng)},
                        [](const auto& x) { return project(matmul(x[0], x[1])); });
  EXPECT_LT(r.worst_relative, kTol);
  r = check_inputs({random_matrix(3, 4, rng), random_matrix(5, 4, rng)},
                   [](const auto& x) { return project(matmul_nt(x[0], x[1])); });
  EXPECT_LT(r.worst_relative, kTol);
}

TEST_F(OpGrad, ElementwiseAndBroadcast) {
  auto a = random_matrix(3, 4, rng);
  auto b = random_matrix(3, 4, rng);
  auto row = random_matrix(1, 4, rng);
  EXPECT_LT(check_inputs({a, b}, [](const auto& x) { return project(add(x[0], x[1])); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a, b}, [](const auto& x) { return project(mul(x[0], x[1])); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a, row}, [](const auto& x) { return project(add_row(x[0], x[1])); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a, row}, [](const auto& x) { return project(mul_row(x[0], x[1])); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a}, [](const auto& x) { return project(scale(x[0], -2.5)); }).worst_relative, kTol);
}

TEST_F(OpGrad, Nonlinearities) {
  auto a = random_matrix(4, 5, rng);
  EXPECT_LT(check_inputs({a}, [](const auto& x) { return project(relu(x[0])); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a}, [](const auto& x) { return project(sigmoid(x[0])); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a}, [](const auto& x) { return project(cos(x[0])); }).worst_relative, kTol);
}

TEST_F(OpGrad, RowOps) {
  auto a = random_matrix(4, 6, rng);
  EXPECT_LT(check_inputs({a}, [](const auto& x) { return project(softmax_rows(x[0])); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a}, [](const auto& x) { return project(layer_norm_rows(x[0])); }).worst_relative, 1e-5);
  EXPECT_LT(check_inputs({a}, [](const auto& x) { return project(mean_rows(x[0])); }).worst_relative, kTol);
}

TEST_F(OpGrad, ShapeOps) {
  auto a = random_matrix(3, 2, rng);
  auto b = random_matrix(3, 3, rng);
  auto c = random_matrix(2, 2, rng);
  EXPECT_LT(check_inputs({a, b}, [](const auto& x) {
              std::vector<Var> parts{x[0], x[1]};
              return project(concat_cols(parts));
            }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a, c}, [](const auto& x) {
              std::vector<Var> parts{x[0], x[1]};
              return project(concat_rows(parts));
            }).worst_relative, kTol);
  EXPECT_LT(check_inputs({b}, [](const auto& x) { return project(slice_cols(x[0], 1, 2)); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({b}, [](const auto& x) { return project(slice_rows(x[0], 1, 2)); }).worst_relative, kTol);
}

TEST_F(OpGrad, GatherReplaceScale) {
  auto a = random_matrix(4, 3, rng);
  auto r = random_matrix(2, 3, rng);
  const std::vector<Index> gather{2, 0, 2, 3};
  const std::vector<Index> replace{3, 1};
  Eigen::VectorXd f(4);
  f << 0.5, -1.0, 2.0, 0.0;
  EXPECT_LT(check_inputs({a}, [&](const auto& x) { return project(gather_rows(x[0], gather)); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a, r}, [&](const auto& x) {
              return project(replace_rows(x[0], replace, x[1]));
            }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a}, [&](const auto& x) { return project(scale_rows(x[0], f)); }).worst_relative, kTol);
}

TEST_F(OpGrad, Segments) {
  auto a = random_matrix(6, 3, rng);
  const std::vector<Index> offsets{0, 2, 3, 6};
  EXPECT_LT(check_inputs({a}, [&](const auto& x) { return project(segment_mean(x[0], offsets)); }).worst_relative, kTol);
  EXPECT_LT(check_inputs({a}, [&](const auto& x) {
              return project(pack_segments(x[0], offsets, 4));
            }).worst_relative, kTol);
  auto packed = random_matrix(3, 12, rng);
  EXPECT_LT(check_inputs({packed}, [&](const auto& x) {
              return project(unpack_segments(x[0], offsets, 3));
            }).worst_relative, kTol);
}

TEST_F(OpGrad, SegmentAttention) {
  auto q = random_matrix(4, 3, rng);
  auto k = random_matrix(7, 3, rng);
  auto v = random_matrix(7, 2, rng);
  const std::vector<Index> q_off{0, 1, 3, 3, 4};
  const std::vector<Index> kv_off{0, 3, 5, 7, 7};  // last query segment has no keys
  auto r = check_inputs({q, k, v}, [&](const auto& x) {
    return project(segment_attention(x[0], x[1], x[2], q_off, kv_off, 0.7));
  });
  EXPECT_LT(r.worst_relative, kTol);
}

TEST_F(OpGrad, BinaryCrossEntropy) {
  Matrix p(3, 1);
  p << 0.2, 0.6, 0.9;
  Matrix t(3, 1);
  t << 1, 0, 1;
  EXPECT_LT(check_inputs({p}, [&](const auto& x) { return binary_cross_entropy(x[0], t); }).worst_relative, kTol);
}

TEST(Softmax, RowsSumToOne) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> width(1, 40);
  for (int i = 0; i < 100; ++i) {
    auto a = random_matrix(3, width(rng), rng, 20.0);
    auto s = softmax_rows(constant(a)).value();
    for (Index r = 0; r < s.rows(); ++r) {
      EXPECT_NEAR(s.row(r).sum(), 1.0, 1e-9);
      EXPECT_GE(s.row(r).minCoeff(), 0.0);
    }
  }
}

TEST(Softmax, AttentionWeightsSumToOne) {
  std::mt19937_64 rng(8);
  auto q = random_matrix(3, 4, rng);
  auto k = random_matrix(6, 4, rng, 30.0);
  auto v = random_matrix(6, 2, rng);
  const std::vector<Index> q_off{0, 1, 2, 3};
  const std::vector<Index> kv_off{0, 1, 4, 6};
  std::vector<Matrix> w;
  segment_attention(constant(q), constant(k), constant(v), q_off, kv_off, 0.5, &w);
  ASSERT_EQ(w.size(), 3u);
  for (const auto& m : w) EXPECT_NEAR(m.sum(), 1.0, 1e-9);
}

TEST(Softmax, LargeLogitsStayFinite) {
  Matrix a(1, 3);
  a << 1000.0, 999.0, -1000.0;
  auto s = softmax_rows(constant(a)).value();
  EXPECT_TRUE(s.allFinite());
  EXPECT_NEAR(s(0, 0), 1.0 / (1.0 + std::exp(-1.0)), 1e-12);
}

TEST(Bce, Examples) {
  Matrix half(2, 1);
  half << 0.5, 0.5;
  Matrix t(2, 1);
  t << 1, 0;
  EXPECT_NEAR(binary_cross_entropy(constant(half), t).scalar(), 2 * std::numbers::ln2, 1e-12);

  Matrix perfect(2, 1);
  perfect << 1.0, 0.0;
  const double clamped = binary_cross_entropy(constant(perfect), t).scalar();
  EXPECT_NEAR(clamped, -2 * std::log(1 - 1e-7), 1e-15);
  EXPECT_NEAR(clamped, 2e-7, 1e-12);

  Matrix wrong(2, 1);
  wrong << 0.0, 1.0;
  const double worst = binary_cross_entropy(constant(wrong), t).scalar();
  EXPECT_TRUE(std::isfinite(worst));
  EXPECT_NEAR(worst, -2 * std::log(1e-7), 1e-9);
}

TEST(Bce, ClampedEntriesGetNoGradient) {
  Matrix p(2, 1);
  p << 0.0, 0.5;
  Matrix t(2, 1);
  t << 1, 1;
  auto x = leaf(p);
  backward(binary_cross_entropy(x, t));
  EXPECT_EQ(x.grad()(0, 0), 0.0);
  EXPECT_NEAR(x.grad()(1, 0), -2.0, 1e-12);
}

TEST(Autodiff, BackwardNeedsScalar) {
  EXPECT_THROW(backward(leaf(Matrix::Ones(2, 1))), NumericalError);
}

TEST(Autodiff, ShapeMismatchIsNumericalError) {
  EXPECT_THROW(matmul(constant(Matrix::Ones(2, 3)), constant(Matrix::Ones(2, 3))), NumericalError);
  EXPECT_THROW(add(constant(Matrix::Ones(2, 3)), constant(Matrix::Ones(3, 2))), NumericalError);
}

TEST(Autodiff, SharedSubgraphAccumulates) {
  auto x = leaf(Matrix::Constant(1, 1, 3.0));
  auto y = mul(x, x);                 // x^2
  backward(sum_all(add(y, y)));       // 2x^2 -> 4x
  EXPECT_DOUBLE_EQ(x.grad()(0, 0), 12.0);
}

TEST(Autodiff, NoGradGuardStopsRecording) {
  EXPECT_TRUE(grad_enabled());
  {
    NoGradGuard guard;
    EXPECT_FALSE(grad_enabled());
    auto y = mul(leaf(Matrix::Ones(1, 1)), leaf(Matrix::Ones(1, 1)));
    EXPECT_FALSE(y.requires_grad());
  }
  EXPECT_TRUE(grad_enabled());
}

TEST(Parameters, ScopeSumsEveryUse) {
  ParameterSet params;
  auto& w = params.create("w", 1, 1);
  w.value(0, 0) = 2.0;
  GradientBuffer grads(params);
  ParameterScope scope;
  auto a = scope(w);
  auto b = scope(w);
  backward(sum_all(mul(a, b)));  // w^2 -> 2w
  scope.collect(grads);
  EXPECT_DOUBLE_EQ(grads[0](0, 0), 4.0);
}

TEST(Parameters, DuplicateNameRejected) {
  ParameterSet params;
  params.create("a", 1, 1);
  EXPECT_THROW(params.create("a", 2, 2), UsageError);
}

TEST(Parameters, SnapshotRestore) {
  ParameterSet params;
  auto& a = params.create("a", 2, 2);
  a.value.setConstant(1.0);
  auto snap = params.snapshot();
  a.value.setConstant(5.0);
  params.restore(snap);
  EXPECT_EQ(a.value, Matrix::Constant(2, 2, 1.0));
  snap[0] = Matrix::Zero(3, 3);
  EXPECT_THROW(params.restore(snap), DataError);
  EXPECT_EQ(params.numel(), 4u);
}

TEST(Adam, MatchesHandComputedSteps) {
  ParameterSet params;
  auto& w = params.create("w", 1, 2);
  w.value << 1.0, -1.0;
  AdamOptions opt;
  opt.lr = 0.1;
  Adam adam(params, opt);
  GradientBuffer g(params);
  Matrix grad(1, 2);
  grad << 0.5, -2.0;
  g.add(0, grad);
  adam.step(g);
  // First step: m_hat = g, v_hat = g^2, so each weight moves by lr * sign(g).
  EXPECT_NEAR(w.value(0, 0), 1.0 - 0.1, 1e-6);
  EXPECT_NEAR(w.value(0, 1), -1.0 + 0.1, 1e-6);

  double m = 0, v = 0, x = w.value(0, 0);
  m = 0.9 * (0.1 * 0.5) + 0.1 * 0.5;
  v = 0.999 * (0.001 * 0.25) + 0.001 * 0.25;
  x -= 0.1 * (m / (1 - 0.81)) / (std::sqrt(v / (1 - 0.999 * 0.999)) + 1e-8);
  adam.step(g);
  EXPECT_NEAR(w.value(0, 0), x, 1e-12);
  EXPECT_EQ(adam.steps(), 2u);
}

TEST(Adam, RejectsMismatchedState) {
  ParameterSet params;
  params.create("w", 1, 2);
  Adam adam(params, {});
  EXPECT_THROW(adam.load_state(1, {Matrix::Zero(2, 2)}, {Matrix::Zero(1, 2)}), DataError);
  EXPECT_THROW(adam.load_state(1, {}, {}), DataError);
}

TEST(Layers, LinearAndMlpShapes) {
  std::mt19937_64 rng(1);
  ParameterSet params;
  Linear lin(params, "lin", 4, 3, true, rng);
  Mlp2 mlp(params, "mlp", 3, 5, 2, rng);
  ParameterScope scope;
  auto y = mlp(scope, lin(scope, constant(Matrix::Ones(6, 4))));
  EXPECT_EQ(y.rows(), 6);
  EXPECT_EQ(y.cols(), 2);
  EXPECT_NE(params.find("lin.weight"), nullptr);
}

TEST(Layers, ParameterGradients) {
  std::mt19937_64 rng(3);
  ParameterSet params;
  Mlp2 mlp(params, "mlp", 4, 6, 3, rng);
  LayerNorm norm(params, "norm", 3);
  params[params.size() - 2].value = random_matrix(1, 3, rng);  // gain
  params[params.size() - 1].value = random_matrix(1, 3, rng);  // shift
  auto x = random_matrix(5, 4, rng);
  auto r = testing::check_parameters(
      params, [&](ParameterScope& s) { return project(norm(s, mlp(s, constant(x)))); }, {}, 40, 11);
  EXPECT_LT(r.worst_relative, 1e-4);
}

}  // namespace
}  // namespace cross::nn
