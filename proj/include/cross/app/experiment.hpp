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
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cross/app/config.hpp"
#include "cross/embed/text_embedder.hpp"
#include "cross/extract/chain_runner.hpp"
#include "cross/extract/llm_client.hpp"
#include "cross/graph/graph_view.hpp"
#include "cross/train/metrics.hpp"
#include "cross/train/node_classification.hpp"
#include "cross/train/trainer.hpp"

namespace cross::app {

/// A frozen graph and its chronological split. Evaluation reads the full
/// view as history.
struct Dataset {
  graph::GraphView full;
  graph::ChronologicalSplit split;
};

Dataset make_dataset(graph::GraphView full, const ExperimentConfig& config);

/// Hash or precomputed embedder, wrapped in a cache.
std::shared_ptr<embed::CachingEmbedder> make_embedder(const ExperimentConfig& config);

extract::ChainOptions chain_options(const ExperimentConfig& config, extract::ChainOrder order,
                                    std::uint64_t scramble_seed = 0);

/// Runs the reasoning chain with the offline mock LLM.
extract::ChainReport extract_with_mock(const graph::GraphView& view,
                                       const extract::ChainOptions& options,
                                       extract::SummaryStore& store,
                                       extract::CostLedger::Snapshot* ledger = nullptr);

/// Summary chains a variant consumes: base text only for no_TSE, the
/// scrambled store for no_TRC, the chronological store otherwise.
std::vector<extract::SummaryChain> variant_chains(const graph::GraphView& view, std::size_t m,
                                                  model::Variant variant,
                                                  const extract::SummaryStore& chronological,
                                                  const extract::SummaryStore* scrambled);

struct LinkRun {
  std::unique_ptr<train::Model> model;
  train::TrainResult training;
  double test_mrr = 0.0;
  std::optional<double> inductive_mrr;  // absent when no test link touches an unseen node
};

/// Trains one model for `seed` and evaluates transductive and inductive test MRR.
LinkRun run_link_prediction(const ExperimentConfig& config, const Dataset& data,
                            const embed::FeatureStore& features, model::Variant variant,
                            std::uint64_t seed,
                            const std::function<void(const train::EpochRecord&)>& on_epoch = {});

/// One row of the ablation table.
struct AblationRow {
  model::Variant variant;
  std::string label;  // "CROSS", "w/o TSE", ...
  train::MetricsReport report;
};

/// The six ablation rows: full, w/o TSE, w/o SC, w/o CM, w/o TRC, w/ CM_all.
std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const Dataset& data,
                                      const embed::TextEmbedder& embedder,
                                      const extract::SummaryStore& chronological,
                                      const extract::SummaryStore& scrambled);

std::string_view ablation_label(model::Variant v);

/// Reads `node_id,label` records (label 0 or 1). Unknown ids are a DataError.
std::vector<train::NodeLabel> load_labels(const std::filesystem::path& path,
                                          const graph::GraphView& view);

struct SweepRow {
  std::size_t m = 0;
  std::string config_hash;
  std::size_t llm_calls = 0;
  train::MetricsReport report;
};

/// One train/evaluate cycle per m with freshly extracted mock summaries.
std::vector<SweepRow> run_parameter_study(const ExperimentConfig& config, const Dataset& data,
                                          const embed::TextEmbedder& embedder,
                                          std::span<const std::size_t> m_values);

}  // namespace cross::app
