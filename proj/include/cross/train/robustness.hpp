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
#include <vector>

#include "cross/train/trainer.hpp"

namespace cross::train {

/// Evaluation under neighbor perturbation at one rate.
struct RobustnessRow {
  double rate = 0.0;
  double mrr = 0.0;
  std::size_t neighbor_slots = 0;  // captured attention entries over all layers
  std::size_t replaced = 0;        // of which were perturbed
  double perturbed_weight = 0.0;   // mean attention weight on perturbed neighbors
  double original_weight = 0.0;    // mean attention weight on original neighbors

  [[nodiscard]] double replaced_fraction() const {
    return neighbor_slots == 0 ? 0.0
                               : static_cast<double>(replaced) / static_cast<double>(neighbor_slots);
  }
};

/// Attention mass split by whether a neighbor was perturbed.
struct AttentionPartition {
  std::size_t perturbed = 0;
  std::size_t original = 0;
  double perturbed_sum = 0.0;
  double original_sum = 0.0;
};

AttentionPartition partition_attention(std::span<const model::AttentionSample> samples);

/// Re-evaluates MRR with every neighbor list perturbed at each rate. The node
/// pool is the history's active nodes; perturbation draws are seeded from
/// (seed, rate index).
std::vector<RobustnessRow> evaluate_robustness(const Model& model, const LinkTask& task,
                                               const graph::GraphView& eval,
                                               std::span<const double> rates,
                                               const MrrOptions& mrr, std::uint64_t seed);

}  // namespace cross::train
