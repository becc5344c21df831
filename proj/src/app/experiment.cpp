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

#include "cross/app/experiment.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/extract/mock_llm.hpp"
#include "cross/graph/io.hpp"

namespace cross::app {

Dataset make_dataset(graph::GraphView full, const ExperimentConfig& config) {
  auto split = graph::chronological_split(
      full, {config.train_ratio, config.val_ratio, config.test_ratio});
  return Dataset{std::move(full), std::move(split)};
}

std::shared_ptr<embed::CachingEmbedder> make_embedder(const ExperimentConfig& config) {
  std::shared_ptr<const embed::TextEmbedder> inner;
  if (config.embedder == "precomputed") {
    auto loaded = embed::PrecomputedEmbedder::load(config.embedding_file);
    if (loaded.dim() != static_cast<Eigen::Index>(config.d)) {
      throw DataError("precomputed embeddings have dimension " + std::to_string(loaded.dim()) +
                      " but d = " + std::to_string(config.d));
    }
    inner = std::make_shared<embed::PrecomputedEmbedder>(std::move(loaded));
  } else {
    inner = std::make_shared<embed::HashEmbedder>(static_cast<Eigen::Index>(config.d));
  }
  return std::make_shared<embed::CachingEmbedder>(std::move(inner));
}

extract::ChainOptions chain_options(const ExperimentConfig& config, extract::ChainOrder order,
                                    std::uint64_t scramble_seed) {
  extract::ChainOptions options;
  options.m = config.m;
  options.prompt.max_history = config.max_history;
  options.max_in_flight = config.llm.max_in_flight;
  options.order = order;
  options.scramble_seed = scramble_seed;
  return options;
}

extract::ChainReport extract_with_mock(const graph::GraphView& view,
                                       const extract::ChainOptions& options,
                                       extract::SummaryStore& store,
                                       extract::CostLedger::Snapshot* ledger) {
  extract::LlmClientOptions client_options;
  client_options.max_in_flight = options.max_in_flight;
  extract::LlmClient client(std::make_shared<extract::MockLlm>(), client_options);
  auto report = extract::run_chain(view, options, client, store);
  if (ledger) *ledger = client.ledger().snapshot();
  return report;
}

std::vector<extract::SummaryChain> variant_chains(const graph::GraphView& view, std::size_t m,
                                                  model::Variant variant,
                                                  const extract::SummaryStore& chronological,
                                                  const extract::SummaryStore* scrambled) {
  if (variant == model::Variant::kNoTSE) return extract::collect_chains(view, m, chronological, true);
  if (variant == model::Variant::kNoTRC) {
    if (!scrambled) throw UsageError("the no_TRC variant needs scrambled summaries");
    return extract::collect_chains(view, m, *scrambled);
  }
  return extract::collect_chains(view, m, chronological);
}

LinkRun run_link_prediction(const ExperimentConfig& config, const Dataset& data,
                            const embed::FeatureStore& features, model::Variant variant,
                            std::uint64_t seed,
                            const std::function<void(const train::EpochRecord&)>& on_epoch) {
  auto encoder_config = config.encoder_config(seed);
  encoder_config.variant = variant;
  LinkRun run;
  run.model = std::make_unique<train::Model>(encoder_config);
  nn::Adam optimizer(run.model->params, {config.lr, config.beta1, config.beta2, config.adam_eps});

  const model::RecentNeighbors neighbors(data.full, config.k);
  const train::LinkTask task{data.full, features, neighbors};
  train::TrainOptions options;
  options.batch_size = config.batch_size;
  options.epochs = config.epochs;
  options.patience = config.patience;
  options.eval_interval = config.eval_interval;
  options.num_negatives = config.num_negatives;
  options.seed = seed;
  run.training = train::train(*run.model, optimizer, task, data.split.train, data.split.val,
                              options, on_epoch);

  train::MrrOptions mrr;
  mrr.num_negatives = config.num_negatives;
  mrr.seed = derive_seed(seed, "test");
  run.test_mrr = train::evaluate_mrr(*run.model, task, data.split.test, mrr).mrr;
  const auto inductive = graph::inductive_filter(data.split.test, data.split.train);
  if (!inductive.empty()) run.inductive_mrr = train::evaluate_mrr(*run.model, task, inductive, mrr).mrr;
  return run;
}

std::string_view ablation_label(model::Variant v) {
  switch (v) {
    case model::Variant::kFull: return "CROSS";
    case model::Variant::kNoTSE: return "w/o TSE";
    case model::Variant::kNoSC: return "w/o SC";
    case model::Variant::kNoCM: return "w/o CM";
    case model::Variant::kNoTRC: return "w/o TRC";
    case model::Variant::kCMAll: return "w/ CM_all";
  }
  return "unknown";
}

std::vector<train::NodeLabel> load_labels(const std::filesystem::path& path,
                                          const graph::GraphView& view) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open label file '" + path.string() + "'");
  std::vector<train::NodeLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = graph::split_record(line, line_no);
    if (fields.size() != 2) throw ParseError(line_no, "expected node_id,label");
    if (fields[1] != "0" && fields[1] != "1") throw ParseError(line_no, "label must be 0 or 1");
    if (!view.nodes().contains(fields[0])) {
      throw ParseError(line_no, "unknown node '" + fields[0] + "'");
    }
    labels.push_back({view.nodes().index_of(fields[0]), fields[1] == "1" ? 1 : 0});
  }
  return labels;
}

std::vector<AblationRow> run_ablation(const ExperimentConfig& config, const Dataset& data,
                                      const embed::TextEmbedder& embedder,
                                      const extract::SummaryStore& chronological,
                                      const extract::SummaryStore& scrambled) {
  using model::Variant;
  std::vector<AblationRow> rows;
  for (auto variant : {Variant::kFull, Variant::kNoTSE, Variant::kNoSC, Variant::kNoCM,
                       Variant::kNoTRC, Variant::kCMAll}) {
    const auto chains = variant_chains(data.full, config.m, variant, chronological, &scrambled);
    const embed::FeatureStore features(data.full, chains, embedder);
    AblationRow row{variant, std::string(ablation_label(variant)),
                    {"link_prediction", "transductive", "mrr", {}, {}}};
    for (auto seed : config.seeds) {
      const auto run = run_link_prediction(config, data, features, variant, seed);
      row.report.seeds.push_back(seed);
      row.report.values.push_back(run.test_mrr);
      spdlog::info("ablation {} seed {}: test MRR {:.4f}", row.label, seed, run.test_mrr);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<SweepRow> run_parameter_study(const ExperimentConfig& config, const Dataset& data,
                                          const embed::TextEmbedder& embedder,
                                          std::span<const std::size_t> m_values) {
  std::vector<SweepRow> rows;
  for (auto m : m_values) {
    ExperimentConfig run_config = config;
    run_config.m = m;
    run_config.validate();
    extract::SummaryStore store;
    extract::CostLedger::Snapshot ledger;
    extract_with_mock(data.full, chain_options(run_config, extract::ChainOrder::kChronological),
                      store, &ledger);
    const auto chains = extract::collect_chains(data.full, m, store);
    const embed::FeatureStore features(data.full, chains, embedder);
    SweepRow row{m, run_config.hash(), ledger.calls,
                 {"link_prediction", "transductive", "mrr", {}, {}}};
    for (auto seed : run_config.seeds) {
      const auto run =
          run_link_prediction(run_config, data, features, model::Variant::kFull, seed);
      row.report.seeds.push_back(seed);
      row.report.values.push_back(run.test_mrr);
      spdlog::info("sweep m={} seed {}: test MRR {:.4f}", m, seed, run.test_mrr);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace cross::app
