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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cross/nn/layers.hpp"

namespace cross::model {

using nn::Index;
using nn::Matrix;
using nn::Var;

/// Deterministic generator for one named component, so that parameter values
/// do not depend on which other components a model variant creates.
std::mt19937_64 component_rng(std::uint64_t seed, const std::string& name);

/// Pre-norm transformer encoder block applied independently to each segment
/// of stacked items. No positional encoding is added.
class SemanticLayer {
 public:
  SemanticLayer(nn::ParameterSet& params, const std::string& name, Index width, Index heads,
                Index ffn_multiplier, std::uint64_t seed);

  /// `items` stacks every sequence's rows; `offsets` delimits the sequences.
  Var operator()(nn::ParameterScope& scope, const Var& items,
                 std::span<const Index> offsets) const;

  [[nodiscard]] Index width() const noexcept { return width_; }
  [[nodiscard]] const nn::Mlp2& feed_forward() const noexcept { return ffn_; }

 private:
  Index width_;
  Index head_dim_;
  std::vector<nn::Linear> query_;
  std::vector<nn::Linear> key_;
  std::vector<nn::Linear> value_;
  nn::Linear out_;
  nn::LayerNorm norm_attention_;
  nn::LayerNorm norm_ffn_;
  nn::Mlp2 ffn_;
};

enum class Aggregation { kSum, kMean };

/// Single-head temporal attention backbone: f_q, f_k, f_v are bias-free linear
/// maps and AGG pools the attention-weighted value rows.
class TemporalAttention {
 public:
  TemporalAttention(nn::ParameterSet& params, const std::string& name, Index input_dim,
                    Index key_dim, Index value_dim, Aggregation aggregation, std::uint64_t seed);

  /// One query row per segment; segment s attends over neighbor rows
  /// [kv_offsets[s], kv_offsets[s+1]). `value_extra` (same rows as
  /// `neighbors`) is added to f_v(neighbors). Empty segments produce zeros.
  Var operator()(nn::ParameterScope& scope, const Var& queries, const Var& neighbors,
                 const Var& value_extra, std::span<const Index> kv_offsets,
                 std::vector<Matrix>* weights = nullptr) const;

  [[nodiscard]] Index key_dim() const noexcept { return key_.out_features(); }
  [[nodiscard]] const nn::Linear& query() const noexcept { return query_; }
  [[nodiscard]] const nn::Linear& key() const noexcept { return key_; }
  [[nodiscard]] const nn::Linear& value() const noexcept { return value_; }

 private:
  nn::Linear query_;
  nn::Linear key_;
  nn::Linear value_;
  Aggregation aggregation_;
};

/// h̃ = MLP(h_prev ∥ H): 2d -> d -> d.
class StructuralLayer {
 public:
  StructuralLayer(nn::ParameterSet& params, const std::string& name, Index dim,
                  std::uint64_t seed);

  Var operator()(nn::ParameterScope& scope, const Var& h_prev, const Var& aggregated) const;
  [[nodiscard]] const nn::Mlp2& mlp() const noexcept { return mlp_; }

 private:
  nn::Mlp2 mlp_;
};

/// Residual two-layer perceptron y = x + MLP(x) over the concatenated
/// semantic and structural parts. The output layer starts at zero, so the
/// mixer is an exact identity until trained.
class CrossModalMixer {
 public:
  CrossModalMixer(nn::ParameterSet& params, const std::string& name, Index input_dim,
                  Index hidden_dim, std::uint64_t seed);

  Var operator()(nn::ParameterScope& scope, const Var& x) const;
  [[nodiscard]] const nn::Mlp2& mlp() const noexcept { return mlp_; }
  /// Zeroes the output layer, restoring the identity map.
  void reset_to_identity();

 private:
  nn::Mlp2 mlp_;
};

}  // namespace cross::model
