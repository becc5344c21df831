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

#include "cross/model/layers.hpp"

#include <array>
#include <cmath>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"

namespace cross::model {

std::mt19937_64 component_rng(std::uint64_t seed, const std::string& name) {
  return std::mt19937_64(derive_seed(seed, name));
}

namespace {

nn::Linear make_linear(nn::ParameterSet& params, const std::string& name, Index in, Index out,
                       bool bias, std::uint64_t seed) {
  auto rng = component_rng(seed, name);
  return nn::Linear(params, name, in, out, bias, rng);
}

nn::Mlp2 make_mlp(nn::ParameterSet& params, const std::string& name, Index in, Index hidden,
                  Index out, std::uint64_t seed) {
  auto rng = component_rng(seed, name);
  return nn::Mlp2(params, name, in, hidden, out, rng);
}

}  // namespace

SemanticLayer::SemanticLayer(nn::ParameterSet& params, const std::string& name, Index width,
                             Index heads, Index ffn_multiplier, std::uint64_t seed)
    : width_(width),
      head_dim_(heads > 0 ? width / heads : 0),
      out_(make_linear(params, name + ".attn.out", width, width, true, seed)),
      norm_attention_(params, name + ".norm1", width),
      norm_ffn_(params, name + ".norm2", width),
      ffn_(make_mlp(params, name + ".ffn", width, ffn_multiplier * width, width, seed)) {
  if (heads < 1 || width % heads != 0) throw UsageError("width must be divisible by head count");
  for (Index h = 0; h < heads; ++h) {
    const auto prefix = name + ".attn.head" + std::to_string(h);
    query_.push_back(make_linear(params, prefix + ".q", width, head_dim_, false, seed));
    key_.push_back(make_linear(params, prefix + ".k", width, head_dim_, false, seed));
    value_.push_back(make_linear(params, prefix + ".v", width, head_dim_, false, seed));
  }
}

Var SemanticLayer::operator()(nn::ParameterScope& scope, const Var& items,
                              std::span<const Index> offsets) const {
  if (items.rows() == 0) throw DataError("semantic layer needs at least one item");
  if (items.cols() != width_) throw NumericalError("semantic layer: item width mismatch");
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) {
    if (offsets[s + 1] == offsets[s]) throw DataError("semantic layer got an empty sequence");
  }
  const Var normed = norm_attention_(scope, items);
  std::vector<Var> heads;
  heads.reserve(query_.size());
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim_));
  for (std::size_t h = 0; h < query_.size(); ++h) {
    heads.push_back(nn::segment_attention(query_[h](scope, normed), key_[h](scope, normed),
                                          value_[h](scope, normed), offsets, offsets, scale));
  }
  const Var attended = nn::add(items, out_(scope, nn::concat_cols(heads)));
  return nn::add(attended, ffn_(scope, norm_ffn_(scope, attended)));
}

TemporalAttention::TemporalAttention(nn::ParameterSet& params, const std::string& name,
                                     Index input_dim, Index key_dim, Index value_dim,
                                     Aggregation aggregation, std::uint64_t seed)
    : query_(make_linear(params, name + ".q", input_dim, key_dim, false, seed)),
      key_(make_linear(params, name + ".k", input_dim, key_dim, false, seed)),
      value_(make_linear(params, name + ".v", input_dim, value_dim, false, seed)),
      aggregation_(aggregation) {}

Var TemporalAttention::operator()(nn::ParameterScope& scope, const Var& queries,
                                  const Var& neighbors, const Var& value_extra,
                                  std::span<const Index> kv_offsets,
                                  std::vector<Matrix>* weights) const {
  if (queries.cols() != query_.in_features() || neighbors.cols() != key_.in_features()) {
    throw NumericalError("temporal attention: input dimension mismatch");
  }
  if (static_cast<Index>(kv_offsets.size()) != queries.rows() + 1) {
    throw NumericalError("temporal attention: one neighbor segment per query is required");
  }
  std::vector<Index> q_offsets(static_cast<std::size_t>(queries.rows() + 1));
  for (std::size_t i = 0; i < q_offsets.size(); ++i) q_offsets[i] = static_cast<Index>(i);

  Var values = value_(scope, neighbors);
  if (value_extra.defined()) values = nn::add(values, value_extra);
  const double scale = 1.0 / std::sqrt(static_cast<double>(key_dim()));
  Var pooled = nn::segment_attention(query_(scope, queries), key_(scope, neighbors), values,
                                     q_offsets, kv_offsets, scale, weights);
  if (aggregation_ == Aggregation::kMean) {
    Eigen::VectorXd factors(queries.rows());
    for (Index s = 0; s < queries.rows(); ++s) {
      const Index n = kv_offsets[static_cast<std::size_t>(s) + 1] -
                      kv_offsets[static_cast<std::size_t>(s)];
      factors(s) = n > 0 ? 1.0 / static_cast<double>(n) : 0.0;
    }
    pooled = nn::scale_rows(pooled, factors);
  }
  return pooled;
}

StructuralLayer::StructuralLayer(nn::ParameterSet& params, const std::string& name, Index dim,
                                 std::uint64_t seed)
    : mlp_(make_mlp(params, name + ".mlp", 2 * dim, dim, dim, seed)) {}

Var StructuralLayer::operator()(nn::ParameterScope& scope, const Var& h_prev,
                                const Var& aggregated) const {
  if (!h_prev.value().allFinite() || !aggregated.value().allFinite()) {
    throw NumericalError("structural layer received non-finite input");
  }
  const std::array<Var, 2> parts{h_prev, aggregated};
  return mlp_(scope, nn::concat_cols(parts));
}

CrossModalMixer::CrossModalMixer(nn::ParameterSet& params, const std::string& name,
                                 Index input_dim, Index hidden_dim, std::uint64_t seed)
    : mlp_(make_mlp(params, name + ".mlp", input_dim, hidden_dim, input_dim, seed)) {
  reset_to_identity();
}

Var CrossModalMixer::operator()(nn::ParameterScope& scope, const Var& x) const {
  return nn::add(x, mlp_(scope, x));
}

void CrossModalMixer::reset_to_identity() {
  mlp_.second().weight().value.setZero();
  mlp_.second().bias()->value.setZero();
}

}  // namespace cross::model
