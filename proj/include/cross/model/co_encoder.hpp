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
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "cross/embed/features.hpp"
#include "cross/embed/time_encoder.hpp"
#include "cross/model/layers.hpp"
#include "cross/model/neighbors.hpp"

namespace cross::model {

/// Model variants for the ablation study. kNoTSE and kNoTRC share the full
/// architecture; they differ only in the summary chains fed to the features.
enum class Variant { kFull, kNoTSE, kNoSC, kNoCM, kCMAll, kNoTRC };

std::string_view to_string(Variant v);
/// Accepts the names printed by to_string. Throws UsageError otherwise.
Variant variant_from_string(std::string_view name);

struct EncoderConfig {
  Index dim = 384;
  std::size_t layers = 2;
  std::size_t neighbors = 10;
  Index heads = 2;
  Index ffn_multiplier = 4;  // semantic feed-forward width = multiplier * 2d
  Aggregation aggregation = Aggregation::kSum;
  bool time_augment = false;  // append Phi(t - tau) to the backbone's inputs
  Variant variant = Variant::kFull;
  std::size_t max_items = 9;  // semantic slots mixed by kCMAll, i.e. m + 1
  std::uint64_t seed = 0;
};

/// Attention weights one node spent on its neighbors at one layer.
struct AttentionSample {
  graph::NodeIndex node = 0;
  double time = 0.0;
  std::size_t layer = 0;
  std::vector<graph::Neighbor> neighbors;
  std::vector<double> weights;
};

/// Values of one layer for the nodes computed at that layer.
struct LayerTrace {
  std::vector<graph::NodeIndex> nodes;
  std::vector<Index> offsets;  // item segments per node
  Matrix pre_items;            // ẽ, stacked
  Matrix post_items;           // e, stacked
  Matrix pre_structural;       // h̃
  Matrix post_structural;      // h
};

struct EncodeInputs {
  const embed::FeatureStore& features;
  const NeighborProvider& neighbors;
  std::vector<AttentionSample>* attention = nullptr;
  std::vector<LayerTrace>* trace = nullptr;  // index 0 is layer 1
};

/// Stack of L (semantic layer, structural layer, mixer) blocks plus the
/// output MLP. All nodes of one call are encoded at the same query time, and
/// every (node, layer) state is computed once per call.
class CoEncoder {
 public:
  CoEncoder(nn::ParameterSet& params, EncoderConfig config);

  /// z_u(t) for each entry of `nodes` (repeats allowed), one row each.
  Var encode(nn::ParameterScope& scope, const EncodeInputs& inputs,
             std::span<const graph::NodeIndex> nodes, double t) const;

  [[nodiscard]] const EncoderConfig& config() const noexcept { return config_; }
  [[nodiscard]] const embed::TimeEncoder& time_encoder() const noexcept { return time_; }
  [[nodiscard]] const SemanticLayer& semantic(std::size_t l) const { return semantic_.at(l); }
  [[nodiscard]] const TemporalAttention& backbone(std::size_t l) const { return backbone_.at(l); }
  [[nodiscard]] const StructuralLayer& structural(std::size_t l) const {
    return structural_.at(l);
  }
  /// nullptr for variants without a mixer.
  [[nodiscard]] CrossModalMixer* mixer(std::size_t l);
  [[nodiscard]] const nn::Mlp2& output() const noexcept { return output_; }

 private:
  EncoderConfig config_;
  embed::TimeEncoder time_;
  std::vector<SemanticLayer> semantic_;
  std::vector<TemporalAttention> backbone_;
  std::vector<StructuralLayer> structural_;
  std::vector<CrossModalMixer> mixers_;
  nn::Mlp2 output_;
};

}  // namespace cross::model
