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
#include <utility>
#include <vector>

#include "cross/train/trainer.hpp"

namespace cross::train {

struct NodeLabel {
  graph::NodeIndex node = 0;
  int label = 0;  // 0 or 1
};

struct ClassifierOptions {
  double train_fraction = 0.7;  // per class
  std::size_t steps = 300;      // full-batch Adam steps
  double lr = 1e-2;
  std::uint64_t seed = 0;
};

struct ClassificationResult {
  double auc = 0.0;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  std::vector<double> test_scores;
  std::vector<int> test_labels;
};

/// Query time for a static label: the node's last interaction time in
/// `history`, or 0 when it has none.
double label_time(const graph::GraphView& history, graph::NodeIndex u);

/// Encodes every labeled node at label_time with the frozen encoder, splits
/// the nodes per class into train/test, fits an MLP d -> d -> 1 on the train
/// part and returns the test AUC. Throws DataError when a class is missing
/// from either part.
ClassificationResult evaluate_node_classification(const Model& model, const LinkTask& task,
                                                  std::span<const NodeLabel> labels,
                                                  const ClassifierOptions& options);

/// Same, on precomputed representations (row i belongs to labels[i]).
ClassificationResult classify_representations(const nn::Matrix& z,
                                              std::span<const NodeLabel> labels,
                                              const ClassifierOptions& options);

}  // namespace cross::train
