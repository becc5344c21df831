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

#include "cross/train/node_classification.hpp"

#include <algorithm>
#include <random>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/nn/adam.hpp"
#include "cross/nn/layers.hpp"
#include "cross/train/metrics.hpp"

namespace cross::train {

double label_time(const graph::GraphView& history, graph::NodeIndex u) {
  const auto times = history.timestamps(u);
  return times.empty() ? 0.0 : times.back();
}

ClassificationResult evaluate_node_classification(const Model& model, const LinkTask& task,
                                                  std::span<const NodeLabel> labels,
                                                  const ClassifierOptions& options) {
  std::vector<std::pair<graph::NodeIndex, double>> queries;
  queries.reserve(labels.size());
  for (const auto& l : labels) queries.emplace_back(l.node, label_time(task.history, l.node));
  return classify_representations(encode_at(model, task, queries), labels, options);
}

ClassificationResult classify_representations(const nn::Matrix& z,
                                              std::span<const NodeLabel> labels,
                                              const ClassifierOptions& options) {
  if (static_cast<std::size_t>(z.rows()) != labels.size()) {
    throw DataError("one representation per labeled node is required");
  }
  if (options.train_fraction <= 0.0 || options.train_fraction >= 1.0) {
    throw UsageError("classifier train fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> by_class[2];
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i].label != 0 && labels[i].label != 1) throw DataError("labels must be 0 or 1");
    by_class[labels[i].label].push_back(i);
  }
  if (by_class[0].size() < 2 || by_class[1].size() < 2) {
    throw DataError("node classification needs at least two nodes of each class");
  }

  std::mt19937_64 rng(derive_seed(options.seed, "classifier.split"));
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (auto& rows : by_class) {
    std::shuffle(rows.begin(), rows.end(), rng);
    auto cut = static_cast<std::size_t>(options.train_fraction * static_cast<double>(rows.size()));
    cut = std::clamp<std::size_t>(cut, 1, rows.size() - 1);
    train_rows.insert(train_rows.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(cut));
    test_rows.insert(test_rows.end(), rows.begin() + static_cast<std::ptrdiff_t>(cut), rows.end());
  }
  std::sort(train_rows.begin(), train_rows.end());
  std::sort(test_rows.begin(), test_rows.end());

  auto gather = [&](const std::vector<std::size_t>& rows, nn::Matrix& x, nn::Matrix& y) {
    x.resize(static_cast<nn::Index>(rows.size()), z.cols());
    y.resize(static_cast<nn::Index>(rows.size()), 1);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      x.row(static_cast<nn::Index>(i)) = z.row(static_cast<nn::Index>(rows[i]));
      y(static_cast<nn::Index>(i), 0) = labels[rows[i]].label;
    }
  };
  nn::Matrix x_train, y_train, x_test, y_test;
  gather(train_rows, x_train, y_train);
  gather(test_rows, x_test, y_test);

  nn::ParameterSet params;
  std::mt19937_64 init(derive_seed(options.seed, "classifier.init"));
  const nn::Mlp2 mlp(params, "classifier", z.cols(), z.cols(), 1, init);
  nn::Adam adam(params, {options.lr, 0.9, 0.999, 1e-8});
  const nn::Var inputs = nn::constant(x_train);
  for (std::size_t s = 0; s < options.steps; ++s) {
    nn::ParameterScope scope;
    const nn::Var p = nn::sigmoid(mlp(scope, inputs));
    const nn::Var loss = nn::binary_cross_entropy(p, y_train);
    nn::backward(loss);
    nn::GradientBuffer grads(params);
    scope.collect(grads);
    if (!grads.all_finite()) throw NumericalError("non-finite classifier gradient");
    adam.step(grads);
  }

  ClassificationResult result;
  result.train_size = train_rows.size();
  result.test_size = test_rows.size();
  nn::NoGradGuard no_grad;
  nn::ParameterScope scope;
  const nn::Var p = nn::sigmoid(mlp(scope, nn::constant(x_test)));
  for (nn::Index i = 0; i < p.value().rows(); ++i) {
    result.test_scores.push_back(p.value()(i, 0));
    result.test_labels.push_back(static_cast<int>(y_test(i, 0)));
  }
  result.auc = roc_auc(result.test_scores, result.test_labels);
  return result;
}

}  // namespace cross::train
