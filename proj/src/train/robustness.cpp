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

#include "cross/train/robustness.hpp"

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/model/neighbors.hpp"

namespace cross::train {

AttentionPartition partition_attention(std::span<const model::AttentionSample> samples) {
  AttentionPartition part;
  for (const auto& s : samples) {
    if (s.weights.size() != s.neighbors.size()) {
      throw DataError("attention sample has mismatched weights and neighbors");
    }
    for (std::size_t j = 0; j < s.neighbors.size(); ++j) {
      if (s.neighbors[j].replaced) {
        ++part.perturbed;
        part.perturbed_sum += s.weights[j];
      } else {
        ++part.original;
        part.original_sum += s.weights[j];
      }
    }
  }
  return part;
}

std::vector<RobustnessRow> evaluate_robustness(const Model& model, const LinkTask& task,
                                               const graph::GraphView& eval,
                                               std::span<const double> rates,
                                               const MrrOptions& mrr, std::uint64_t seed) {
  const auto pool = task.history.active_nodes();
  std::vector<RobustnessRow> rows;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double p = rates[i];
    if (p < 0.0 || p > 1.0) throw UsageError("perturbation rates must lie in [0, 1]");
    const model::PerturbedNeighbors perturbed(task.neighbors, p,
                                              derive_seed(derive_seed(seed, "perturb"), i), pool);
    const LinkTask noisy{task.history, task.features, perturbed};
    std::vector<model::AttentionSample> attention;
    RobustnessRow row;
    row.rate = p;
    row.mrr = evaluate_mrr(model, noisy, eval, mrr, &attention).mrr;
    const auto part = partition_attention(attention);
    row.neighbor_slots = part.perturbed + part.original;
    row.replaced = part.perturbed;
    if (part.perturbed > 0) row.perturbed_weight = part.perturbed_sum / static_cast<double>(part.perturbed);
    if (part.original > 0) row.original_weight = part.original_sum / static_cast<double>(part.original);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace cross::train
