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

#include "cross/model/co_encoder.hpp"

#include <array>
#include <unordered_map>

#include "cross/common/error.hpp"

namespace cross::model {
namespace {

constexpr std::array<std::pair<Variant, std::string_view>, 6> kVariantNames{{
    {Variant::kFull, "full"},
    {Variant::kNoTSE, "no_TSE"},
    {Variant::kNoSC, "no_SC"},
    {Variant::kNoCM, "no_CM"},
    {Variant::kCMAll, "CM_all"},
    {Variant::kNoTRC, "no_TRC"},
}};

bool mixes(Variant v) { return v != Variant::kNoSC && v != Variant::kNoCM; }

std::vector<Index> last_rows(std::span<const Index> offsets) {
  std::vector<Index> out;
  out.reserve(offsets.size() - 1);
  for (std::size_t s = 0; s + 1 < offsets.size(); ++s) out.push_back(offsets[s + 1] - 1);
  return out;
}

}  // namespace

std::string_view to_string(Variant v) {
  for (const auto& [variant, name] : kVariantNames) {
    if (variant == v) return name;
  }
  return "unknown";
}

Variant variant_from_string(std::string_view name) {
  for (const auto& [variant, n] : kVariantNames) {
    if (n == name) return variant;
  }
  throw UsageError("unknown variant '" + std::string(name) +
                   "' (expected full, no_TSE, no_SC, no_CM, CM_all or no_TRC)");
}

CoEncoder::CoEncoder(nn::ParameterSet& params, EncoderConfig config)
    : config_(config),
      time_(params, "time", config.dim),
      output_([&] {
        auto rng = component_rng(config.seed, "output");
        return nn::Mlp2(params, "output", 6 * config.dim, config.dim, config.dim, rng);
      }()) {
  const Index d = config_.dim;
  if (d < 1 || config_.layers < 1 || config_.neighbors < 1 || config_.max_items < 1) {
    throw UsageError("encoder dimension, layer count, neighbor count and slots must be >= 1");
  }
  const Index struct_in = config_.time_augment ? 2 * d : d;
  for (std::size_t l = 0; l < config_.layers; ++l) {
    const auto prefix = "layer" + std::to_string(l + 1);
    semantic_.emplace_back(params, prefix + ".semantic", 2 * d, config_.heads,
                           config_.ffn_multiplier, config_.seed);
    backbone_.emplace_back(params, prefix + ".backbone", struct_in, d, d, config_.aggregation,
                           config_.seed);
    structural_.emplace_back(params, prefix + ".structural", d, config_.seed);
    if (config_.variant == Variant::kCMAll) {
      const auto slots = static_cast<Index>(config_.max_items);
      mixers_.emplace_back(params, prefix + ".mixer_all", slots * 2 * d + d, 3 * d, config_.seed);
    } else if (mixes(config_.variant)) {
      mixers_.emplace_back(params, prefix + ".mixer", 3 * d, 3 * d, config_.seed);
    }
  }
}

CrossModalMixer* CoEncoder::mixer(std::size_t l) {
  return l < mixers_.size() ? &mixers_[l] : nullptr;
}

Var CoEncoder::encode(nn::ParameterScope& scope, const EncodeInputs& inputs,
                      std::span<const graph::NodeIndex> nodes, double t) const {
  const auto& features = inputs.features;
  const Index d = config_.dim;
  const Index width = 2 * d;
  const std::size_t depth = config_.layers;
  if (features.dim() != d) throw UsageError("feature dimension differs from model dimension");
  if (nodes.empty()) throw DataError("encode needs at least one node");
  if (!(t >= 0.0)) throw DataError("query time must be non-negative");

  // Distinct query nodes in first-appearance order.
  std::vector<graph::NodeIndex> query;
  std::vector<Index> back;
  {
    std::unordered_map<graph::NodeIndex, Index> seen;
    for (auto u : nodes) {
      if (u >= static_cast<graph::NodeIndex>(features.node_text().rows())) {
        throw DataError("unknown node index " + std::to_string(u));
      }
      auto [it, inserted] = seen.emplace(u, static_cast<Index>(query.size()));
      if (inserted) query.push_back(u);
      back.push_back(it->second);
    }
  }

  // sets[l] holds the nodes whose layer-l state is needed; sets[l] is a
  // prefix of sets[l-1], which adds the neighbors sampled at layer l.
  std::vector<std::vector<graph::NodeIndex>> sets(depth + 1);
  std::vector<std::vector<std::vector<graph::Neighbor>>> sampled(depth + 1);
  std::vector<std::vector<Index>> neighbor_rows(depth + 1);
  std::vector<std::vector<Index>> neighbor_offsets(depth + 1);
  sets[depth] = query;
  for (std::size_t l = depth; l >= 1; --l) {
    auto& below = sets[l - 1];
    below = sets[l];
    std::unordered_map<graph::NodeIndex, Index> row;
    for (std::size_t i = 0; i < below.size(); ++i) row.emplace(below[i], static_cast<Index>(i));
    neighbor_offsets[l].push_back(0);
    for (auto u : sets[l]) {
      auto list = inputs.neighbors.neighbors(u, t, l);
      for (const auto& nb : list) {
        if (!(nb.time < t)) throw DataError("neighbor provider returned a non-causal neighbor");
        auto [it, inserted] = row.emplace(nb.node, static_cast<Index>(below.size()));
        if (inserted) below.push_back(nb.node);
        neighbor_rows[l].push_back(it->second);
      }
      neighbor_offsets[l].push_back(static_cast<Index>(neighbor_rows[l].size()));
      sampled[l].push_back(std::move(list));
    }
  }

  // Layer 0: x_u(t_k) = embedding ∥ Phi(t - t_k), and h^(0) = raw text embedding.
  std::vector<Index> offsets{0};
  std::vector<double> deltas;
  for (auto u : sets[0]) {
    offsets.push_back(offsets.back() + static_cast<Index>(features.chain_count_before(u, t)));
  }
  Matrix embeddings(offsets.back(), d);
  Matrix h0(static_cast<Index>(sets[0].size()), d);
  for (std::size_t i = 0; i < sets[0].size(); ++i) {
    const auto u = sets[0][i];
    const Index count = offsets[i + 1] - offsets[i];
    embeddings.middleRows(offsets[i], count) = features.chain_embeddings(u).topRows(count);
    const auto times = features.chain_times(u);
    for (Index k = 0; k < count; ++k) deltas.push_back(t - times[static_cast<std::size_t>(k)]);
    h0.row(static_cast<Index>(i)) = features.node_text().row(u);
  }
  Var items;
  {
    const std::array<Var, 2> parts{nn::constant(std::move(embeddings)), time_(scope, deltas)};
    items = nn::concat_cols(parts);
  }
  Var h = nn::constant(std::move(h0));

  Var pre_items;
  Var pre_h;
  for (std::size_t l = 1; l <= depth; ++l) {
    const auto n = static_cast<Index>(sets[l].size());
    offsets.resize(static_cast<std::size_t>(n) + 1);
    const Index item_rows = offsets.back();
    const Var layer_items = item_rows == items.rows() ? items : nn::slice_rows(items, 0, item_rows);
    const Var h_prev = n == h.rows() ? h : nn::slice_rows(h, 0, n);

    pre_items = semantic_[l - 1](scope, layer_items, offsets);

    const auto& rows = neighbor_rows[l];
    Matrix edge_embeddings(static_cast<Index>(rows.size()), d);
    std::vector<double> neighbor_deltas;
    {
      Index r = 0;
      for (const auto& list : sampled[l]) {
        for (const auto& nb : list) {
          edge_embeddings.row(r++) = features.edge_text().row(static_cast<Index>(nb.edge));
          neighbor_deltas.push_back(t - nb.time);
        }
      }
    }
    Var q_in = h_prev;
    Var kv_in = nn::gather_rows(h, rows);
    if (config_.time_augment) {
      const std::vector<double> zeros(static_cast<std::size_t>(n), 0.0);
      const std::array<Var, 2> q_parts{q_in, time_(scope, zeros)};
      const std::array<Var, 2> kv_parts{kv_in, time_(scope, neighbor_deltas)};
      q_in = nn::concat_cols(q_parts);
      kv_in = nn::concat_cols(kv_parts);
    }
    std::vector<Matrix> weights;
    const Var aggregated =
        backbone_[l - 1](scope, q_in, kv_in, nn::constant(std::move(edge_embeddings)),
                         neighbor_offsets[l], inputs.attention ? &weights : nullptr);
    pre_h = structural_[l - 1](scope, h_prev, aggregated);

    const auto last = last_rows(offsets);
    Var post_items = pre_items;
    Var post_h = pre_h;
    if (config_.variant == Variant::kCMAll) {
      const auto slots = static_cast<Index>(config_.max_items);
      const std::array<Var, 2> parts{nn::pack_segments(pre_items, offsets, slots), pre_h};
      const Var mixed = mixers_[l - 1](scope, nn::concat_cols(parts));
      post_items = nn::unpack_segments(nn::slice_cols(mixed, 0, slots * width), offsets, width);
      post_h = nn::slice_cols(mixed, slots * width, d);
    } else if (mixes(config_.variant)) {
      const std::array<Var, 2> parts{nn::gather_rows(pre_items, last), pre_h};
      const Var mixed = mixers_[l - 1](scope, nn::concat_cols(parts));
      post_items = nn::replace_rows(pre_items, last, nn::slice_cols(mixed, 0, width));
      post_h = nn::slice_cols(mixed, width, d);
    }

    if (inputs.attention) {
      for (std::size_t i = 0; i < sampled[l].size(); ++i) {
        AttentionSample sample{sets[l][i], t, l, sampled[l][i], {}};
        const Matrix& w = weights[i];
        sample.weights.assign(w.data(), w.data() + w.size());
        inputs.attention->push_back(std::move(sample));
      }
    }
    if (inputs.trace) {
      inputs.trace->push_back({sets[l], offsets, pre_items.value(), post_items.value(),
                               pre_h.value(), post_h.value()});
    }
    items = post_items;
    h = post_h;
  }

  const auto n = static_cast<Index>(query.size());
  Var z_mix;
  if (config_.variant == Variant::kNoSC) {
    z_mix = nn::constant(Matrix::Zero(n, 3 * d));
  } else {
    const std::array<Var, 2> parts{nn::gather_rows(items, last_rows(offsets)), h};
    z_mix = nn::concat_cols(parts);
  }
  const std::array<Var, 3> folds{nn::segment_mean(pre_items, offsets), pre_h, z_mix};
  Var z = output_(scope, nn::concat_cols(folds));

  bool identity = static_cast<Index>(back.size()) == n;
  for (std::size_t i = 0; identity && i < back.size(); ++i) identity = back[i] == static_cast<Index>(i);
  return identity ? z : nn::gather_rows(z, back);
}

}  // namespace cross::model
