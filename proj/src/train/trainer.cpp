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

#include "cross/train/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <unordered_map>

#include <spdlog/spdlog.h>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/train/metrics.hpp"
#include "cross/train/sampler.hpp"

namespace cross::train {
namespace {

/// [begin, end) runs of equal timestamps.
std::vector<std::pair<std::size_t, std::size_t>> time_groups(
    std::span<const graph::TemporalInteraction> edges) {
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && edges[j].time == edges[i].time) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  return groups;
}

}  // namespace

Model::Model(model::EncoderConfig config)
    : encoder(params, config), head(params, config.dim, config.seed) {}

nn::Var batch_loss(const Model& model, nn::ParameterScope& scope, const LinkTask& task,
                   std::span<const graph::TemporalInteraction> batch,
                   std::span<const graph::NodeIndex> negatives) {
  if (batch.empty()) throw DataError("empty batch");
  if (negatives.size() != batch.size()) throw DataError("one negative per positive is required");
  const double t = batch.front().time;
  const auto n = static_cast<nn::Index>(batch.size());
  std::vector<graph::NodeIndex> nodes;
  nodes.reserve(3 * batch.size());
  for (const auto& e : batch) {
    if (e.time != t) throw DataError("batch_loss expects a single timestamp");
    nodes.push_back(e.src);
  }
  for (const auto& e : batch) nodes.push_back(e.dst);
  nodes.insert(nodes.end(), negatives.begin(), negatives.end());

  const nn::Var z = model.encoder.encode(scope, {task.features, task.neighbors}, nodes, t);
  const nn::Var z_src = nn::slice_rows(z, 0, n);
  const nn::Var positive = model.head(scope, z_src, nn::slice_rows(z, n, n));
  const nn::Var negative = model.head(scope, z_src, nn::slice_rows(z, 2 * n, n));
  return link_loss(positive, negative);
}

TrainResult train(Model& model, nn::Adam& optimizer, const LinkTask& task,
                  const graph::GraphView& train_view, const graph::GraphView& val_view,
                  const TrainOptions& options,
                  const std::function<void(const EpochRecord&)>& on_epoch) {
  if (options.batch_size == 0 || options.epochs == 0 || options.eval_interval == 0 ||
      options.patience == 0) {
    throw UsageError("batch size, epochs, eval interval and patience must be >= 1");
  }
  if (train_view.empty()) throw DataError("training split is empty");

  TrainResult result;
  const auto edges = train_view.interactions();
  const auto pool = train_view.destination_nodes();
  std::vector<nn::Matrix> best_params;
  std::size_t rounds_without_gain = 0;

  for (std::size_t epoch = 1; epoch <= options.epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    NegativeSampler sampler(pool, derive_seed(derive_seed(options.seed, "train.negatives"), epoch));
    double loss_sum = 0.0;
    for (std::size_t b = 0; b < edges.size(); b += options.batch_size) {
      const auto batch = edges.subspan(b, std::min(options.batch_size, edges.size() - b));
      nn::GradientBuffer grads(model.params);
      for (const auto& [lo, hi] : time_groups(batch)) {
        const auto group = batch.subspan(lo, hi - lo);
        std::vector<graph::NodeIndex> negatives;
        negatives.reserve(group.size());
        for (const auto& e : group) negatives.push_back(sampler.sample(e.dst));
        nn::ParameterScope scope;
        const nn::Var loss = batch_loss(model, scope, task, group, negatives);
        if (!std::isfinite(loss.scalar())) {
          throw NumericalError("non-finite loss in epoch " + std::to_string(epoch) +
                               " at interaction " + std::to_string(b + lo));
        }
        nn::backward(loss);
        scope.collect(grads);
        loss_sum += loss.scalar();
      }
      if (!grads.all_finite()) {
        throw NumericalError("non-finite gradient in epoch " + std::to_string(epoch));
      }
      optimizer.step(grads);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.loss = loss_sum / static_cast<double>(edges.size());
    const bool evaluate = epoch % options.eval_interval == 0 || epoch == options.epochs;
    if (evaluate && !val_view.empty()) {
      MrrOptions mrr_options;
      mrr_options.num_negatives = options.num_negatives;
      mrr_options.seed = derive_seed(options.seed, "validation");
      const double mrr = evaluate_mrr(model, task, val_view, mrr_options).mrr;
      record.val_mrr = mrr;
      if (!result.best_val_mrr || mrr > *result.best_val_mrr) {
        result.best_val_mrr = mrr;
        result.best_epoch = epoch;
        best_params = model.params.snapshot();
        rounds_without_gain = 0;
      } else {
        ++rounds_without_gain;
      }
    }
    record.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    spdlog::debug("epoch {} loss {:.6f} val_mrr {} ({:.1f}s)", epoch, record.loss,
                  record.val_mrr ? std::to_string(*record.val_mrr) : "-", record.seconds);
    result.log.push_back(record);
    if (on_epoch) on_epoch(record);
    if (rounds_without_gain >= options.patience) {
      result.stopped_early = epoch < options.epochs;
      break;
    }
  }
  if (!best_params.empty()) model.params.restore(best_params);
  return result;
}

nn::Matrix encode_at(const Model& model, const LinkTask& task,
                     std::span<const std::pair<graph::NodeIndex, double>> queries) {
  nn::NoGradGuard no_grad;
  std::map<double, std::vector<std::size_t>> by_time;
  for (std::size_t i = 0; i < queries.size(); ++i) by_time[queries[i].second].push_back(i);
  nn::Matrix out(static_cast<nn::Index>(queries.size()), model.encoder.config().dim);
  for (const auto& [t, rows] : by_time) {
    std::vector<graph::NodeIndex> nodes;
    nodes.reserve(rows.size());
    for (auto i : rows) nodes.push_back(queries[i].first);
    nn::ParameterScope scope;
    const nn::Var z = model.encoder.encode(scope, {task.features, task.neighbors}, nodes, t);
    for (std::size_t k = 0; k < rows.size(); ++k) {
      out.row(static_cast<nn::Index>(rows[k])) = z.value().row(static_cast<nn::Index>(k));
    }
  }
  return out;
}

MrrResult evaluate_mrr(const Model& model, const LinkTask& task, const graph::GraphView& eval,
                       const MrrOptions& options,
                       std::vector<model::AttentionSample>* attention) {
  if (eval.empty()) throw DataError("evaluation split is empty");
  if (options.num_negatives == 0) throw UsageError("number of negatives must be >= 1");
  nn::NoGradGuard no_grad;
  const auto edges = eval.interactions();
  const std::size_t total =
      options.max_queries == 0 ? edges.size() : std::min(options.max_queries, edges.size());
  const auto pool = eval.destination_nodes();
  const nn::Index d = model.encoder.config().dim;

  MrrResult result;
  result.reciprocal_ranks.reserve(total);
  for (const auto& [lo, hi] : time_groups(edges.first(total))) {
    const double t = edges[lo].time;
    std::vector<std::vector<graph::NodeIndex>> negatives(hi - lo);
    std::vector<graph::NodeIndex> nodes;
    for (std::size_t q = lo; q < hi; ++q) {
      NegativeSampler sampler(pool, derive_seed(derive_seed(options.seed, "eval.negatives"), q));
      auto& negs = negatives[q - lo];
      for (std::size_t i = 0; i < options.num_negatives; ++i) negs.push_back(sampler.sample(edges[q].dst));
      nodes.push_back(edges[q].src);
      nodes.push_back(edges[q].dst);
      nodes.insert(nodes.end(), negs.begin(), negs.end());
    }
    // Encode each distinct node once for this timestamp.
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    nn::ParameterScope scope;
    const nn::Var z = model.encoder.encode(scope, {task.features, task.neighbors, attention},
                                           nodes, t);
    std::unordered_map<graph::NodeIndex, nn::Index> row;
    for (std::size_t i = 0; i < nodes.size(); ++i) row.emplace(nodes[i], static_cast<nn::Index>(i));

    for (std::size_t q = lo; q < hi; ++q) {
      const auto& negs = negatives[q - lo];
      const auto candidates = static_cast<nn::Index>(negs.size() + 1);
      nn::Matrix src(candidates, d);
      nn::Matrix dst(candidates, d);
      src.rowwise() = z.value().row(row.at(edges[q].src));
      dst.row(0) = z.value().row(row.at(edges[q].dst));
      for (std::size_t i = 0; i < negs.size(); ++i) {
        dst.row(static_cast<nn::Index>(i) + 1) = z.value().row(row.at(negs[i]));
      }
      const nn::Var p = model.head(scope, nn::constant(std::move(src)), nn::constant(std::move(dst)));
      const auto& scores = p.value();
      std::vector<double> neg_scores(scores.data() + 1, scores.data() + candidates);
      result.reciprocal_ranks.push_back(reciprocal_rank(scores(0, 0), neg_scores));
    }
  }
  result.mrr = mean(result.reciprocal_ranks);
  return result;
}

}  // namespace cross::train
