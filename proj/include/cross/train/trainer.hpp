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
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "cross/embed/features.hpp"
#include "cross/model/co_encoder.hpp"
#include "cross/nn/adam.hpp"
#include "cross/train/head.hpp"

namespace cross::train {

/// Encoder and prediction head sharing one parameter set.
struct Model {
  explicit Model(model::EncoderConfig config);
  Model(const Model&) = delete;
  Model& operator=(const Model&) = delete;

  nn::ParameterSet params;
  model::CoEncoder encoder;
  PredictionHead head;
};

/// What the encoder reads: the global history, its features, and how
/// neighbors are sampled.
struct LinkTask {
  const graph::GraphView& history;
  const embed::FeatureStore& features;
  const model::NeighborProvider& neighbors;
};

struct TrainOptions {
  std::size_t batch_size = 256;
  std::size_t epochs = 50;
  std::size_t patience = 5;       // evaluation rounds without improvement
  std::size_t eval_interval = 5;  // epochs between validation rounds
  std::size_t num_negatives = 100;
  std::uint64_t seed = 0;
};

struct EpochRecord {
  std::size_t epoch = 0;
  double loss = 0.0;  // summed BCE divided by the number of positives
  std::optional<double> val_mrr;
  double seconds = 0.0;
};

struct TrainResult {
  std::vector<EpochRecord> log;
  std::optional<double> best_val_mrr;
  std::size_t best_epoch = 0;
  bool stopped_early = false;
};

/// Chronological mini-batch training with one sampled negative per positive
/// and validation-MRR early stopping. The best validated parameters are
/// restored before returning. Throws NumericalError on a non-finite loss.
TrainResult train(Model& model, nn::Adam& optimizer, const LinkTask& task,
                  const graph::GraphView& train_view, const graph::GraphView& val_view,
                  const TrainOptions& options,
                  const std::function<void(const EpochRecord&)>& on_epoch = {});

/// Summed link loss of one batch at a single timestamp; exposed for tests.
nn::Var batch_loss(const Model& model, nn::ParameterScope& scope, const LinkTask& task,
                   std::span<const graph::TemporalInteraction> batch,
                   std::span<const graph::NodeIndex> negatives);

struct MrrOptions {
  std::size_t num_negatives = 100;
  std::uint64_t seed = 0;
  std::size_t max_queries = 0;  // 0 evaluates every interaction
};

struct MrrResult {
  double mrr = 0.0;
  std::vector<double> reciprocal_ranks;
};

/// Ranks each eval interaction's destination against num_negatives
/// destinations drawn (with replacement, never the true one) from the eval
/// view's destination nodes. Negatives for query i are seeded by (seed, i).
MrrResult evaluate_mrr(const Model& model, const LinkTask& task, const graph::GraphView& eval,
                       const MrrOptions& options,
                       std::vector<model::AttentionSample>* attention = nullptr);

/// z_u(t) for every (node, time) pair, batched by time; no gradients.
nn::Matrix encode_at(const Model& model, const LinkTask& task,
                     std::span<const std::pair<graph::NodeIndex, double>> queries);

}  // namespace cross::train
