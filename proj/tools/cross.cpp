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

// cross: command-line driver for ingest, extraction, training and evaluation.

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>

#include "cross/app/checkpoint.hpp"
#include "cross/app/config.hpp"
#include "cross/app/experiment.hpp"
#include "cross/app/report.hpp"
#include "cross/app/synth.hpp"
#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/extract/http_llm.hpp"
#include "cross/extract/mock_llm.hpp"
#include "cross/graph/io.hpp"
#include "cross/train/node_classification.hpp"
#include "cross/train/robustness.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using namespace cross;

// Flags that override the config file.
struct Overrides {
  std::optional<std::size_t> d, layers, m, k, batch_size, epochs, patience, eval_interval,
      num_negatives, threads;
  std::optional<double> lr;
  std::optional<std::string> variant, embedder, embedding_file, aggregation;
  std::vector<std::uint64_t> seeds;
  std::optional<bool> deterministic;
};

struct Globals {
  std::string work_dir = ".";
  std::string config_path;
  std::string log_level = "info";
  Overrides over;
};

struct Workspace {
  fs::path root;

  [[nodiscard]] fs::path view() const { return root / "view"; }
  [[nodiscard]] fs::path summaries(bool scrambled) const {
    return root / (scrambled ? "summaries_scrambled.jsonl" : "summaries.jsonl");
  }
  [[nodiscard]] fs::path ledger(bool scrambled) const {
    return root / (scrambled ? "llm_ledger_scrambled.json" : "llm_ledger.json");
  }
  [[nodiscard]] fs::path embeddings() const { return root / "embeddings.txt"; }
  [[nodiscard]] fs::path checkpoint() const { return root / "model.ckpt"; }
  [[nodiscard]] fs::path train_log() const { return root / "train_log.jsonl"; }
  [[nodiscard]] fs::path metrics() const { return root / "metrics.jsonl"; }
  [[nodiscard]] fs::path robustness() const { return root / "robustness.jsonl"; }
  [[nodiscard]] fs::path synth() const { return root / "synth"; }
  [[nodiscard]] fs::path config() const { return root / "config.json"; }
};

/// Throws a DataError naming the subcommand that produces `path`.
void require(const fs::path& path, const std::string& producer) {
  if (!fs::exists(path)) {
    throw DataError("missing '" + path.string() + "'; run `cross " + producer + "` first");
  }
}

app::ExperimentConfig resolve_config(const Globals& g, const Workspace& ws) {
  app::ExperimentConfig c;
  if (!g.config_path.empty()) {
    c = app::ExperimentConfig::load(g.config_path);
  } else if (fs::exists(ws.config())) {
    c = app::ExperimentConfig::load(ws.config());
  }
  const auto& o = g.over;
  if (o.d) c.d = *o.d;
  if (o.layers) c.layers = *o.layers;
  if (o.m) c.m = *o.m;
  if (o.k) c.k = *o.k;
  if (o.batch_size) c.batch_size = *o.batch_size;
  if (o.epochs) c.epochs = *o.epochs;
  if (o.patience) c.patience = *o.patience;
  if (o.eval_interval) c.eval_interval = *o.eval_interval;
  if (o.num_negatives) c.num_negatives = *o.num_negatives;
  if (o.threads) c.threads = *o.threads;
  if (o.lr) c.lr = *o.lr;
  if (o.variant) c.variant = *o.variant;
  if (o.embedder) c.embedder = *o.embedder;
  if (o.embedding_file) c.embedding_file = *o.embedding_file;
  if (o.aggregation) c.aggregation = *o.aggregation;
  if (!o.seeds.empty()) c.seeds = o.seeds;
  if (o.deterministic) c.deterministic = *o.deterministic;
  c.validate();
  return c;
}

graph::GraphView load_view(const Workspace& ws) {
  require(ws.view() / "meta.json", "ingest");
  return graph::load_view(ws.view());
}

/// The configured embedder, seeded from the `embed` cache when one exists.
std::shared_ptr<embed::CachingEmbedder> load_embedder(const app::ExperimentConfig& c,
                                                      const Workspace& ws) {
  auto embedder = app::make_embedder(c);
  if (fs::exists(ws.embeddings())) {
    const auto saved = embed::PrecomputedEmbedder::load(ws.embeddings());
    if (saved.dim() == embedder->dim()) {
      embedder->preload(saved);
    } else {
      spdlog::warn("ignoring '{}': dimension {} differs from d = {}", ws.embeddings().string(),
                   saved.dim(), embedder->dim());
    }
  }
  return embedder;
}

/// Chains for `variant`, loading the summary stores it needs.
std::vector<extract::SummaryChain> load_chains(const app::ExperimentConfig& c, const Workspace& ws,
                                               const graph::GraphView& view,
                                               model::Variant variant) {
  require(ws.summaries(false), "extract");
  extract::SummaryStore chronological(ws.summaries(false));
  std::unique_ptr<extract::SummaryStore> scrambled;
  if (variant == model::Variant::kNoTRC) {
    require(ws.summaries(true), "extract --scramble");
    scrambled = std::make_unique<extract::SummaryStore>(ws.summaries(true));
  }
  return app::variant_chains(view, c.m, variant, chronological, scrambled.get());
}

void write_json(const fs::path& path, const json& j) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad list entry '" + item + "' in '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError("empty list");
  return out;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  app::SynthConfig config;
  std::string out;
  bool ingest = true;
};

int run_synth(const Globals& g, const SynthArgs& a) {
  const Workspace ws{g.work_dir};
  const fs::path out = a.out.empty() ? ws.synth() : fs::path(a.out);
  const auto data = app::synth_graph(a.config);
  app::write_synth(data, out);
  std::printf("wrote %zu nodes and %zu edges to %s\n", data.nodes.size(), data.draws.size(),
              out.string().c_str());
  std::printf("post-drift topic-matched links: %.4f\n", app::post_drift_match_rate(data));
  if (a.ingest) {
    const auto c = resolve_config(g, ws);
    const auto view = graph::ingest_files(out / "edges.csv", out / "nodes.csv");
    graph::save_view(view, ws.view(), c.hash());
    std::printf("ingested view into %s\n", ws.view().string().c_str());
  }
  return 0;
}

// ---------------------------------------------------------------- ingest

struct IngestArgs {
  std::string edges;
  std::string nodes;
};

int run_ingest(const Globals& g, const IngestArgs& a) {
  const Workspace ws{g.work_dir};
  const auto c = resolve_config(g, ws);
  const auto view = graph::ingest_files(a.edges, a.nodes);
  graph::save_view(view, ws.view(), c.hash());
  std::printf("%zu nodes, %zu interactions, content hash %s\n", view.num_nodes(),
              view.num_interactions(), to_hex(view.content_hash()).c_str());
  return 0;
}

// ---------------------------------------------------------------- extract

struct ExtractArgs {
  bool mock = false;
  bool scramble = false;
  std::uint64_t scramble_seed = 0;
};

int run_extract(const Globals& g, const ExtractArgs& a) {
  const Workspace ws{g.work_dir};
  const auto c = resolve_config(g, ws);
  const auto view = load_view(ws);
  const auto order = a.scramble ? extract::ChainOrder::kScrambled : extract::ChainOrder::kChronological;
  const auto options = app::chain_options(c, order, a.scramble_seed);

  std::shared_ptr<extract::LlmTransport> transport;
  if (a.mock) {
    transport = std::make_shared<extract::MockLlm>();
  } else {
    extract::EndpointConfig endpoint;
    endpoint.base_url = c.llm.base_url;
    endpoint.api_key_env = c.llm.api_key_env;
    endpoint.model = c.llm.model;
    endpoint.timeout_s = c.llm.timeout_s;
    transport = std::make_shared<extract::HttpLlmTransport>(endpoint);
  }
  extract::LlmClientOptions client_options;
  client_options.max_in_flight = c.llm.max_in_flight;
  client_options.retry.max_attempts = static_cast<int>(c.llm.max_attempts);
  client_options.retry.initial_backoff =
      std::chrono::milliseconds(static_cast<long>(c.llm.initial_backoff_s * 1000.0));
  extract::LlmClient client(transport, client_options);

  extract::SummaryStore store(ws.summaries(a.scramble), c.hash());
  const auto report = extract::run_chain(view, options, client, store);
  const auto ledger = client.ledger().snapshot();
  write_json(ws.ledger(a.scramble), {{"config_hash", c.hash()},
                                     {"m", c.m},
                                     {"scheduled", report.scheduled},
                                     {"generated", report.generated},
                                     {"cached", report.cached},
                                     {"calls", ledger.calls},
                                     {"input_tokens", ledger.input_tokens},
                                     {"output_tokens", ledger.output_tokens},
                                     {"llm_wall_time_s", ledger.wall_time_s},
                                     {"elapsed_s", report.elapsed_s}});
  std::printf("scheduled %zu, generated %zu, cached %zu\n", report.scheduled, report.generated,
              report.cached);
  std::printf("llm calls: %zu (tokens in %zu, out %zu)\n", ledger.calls, ledger.input_tokens,
              ledger.output_tokens);
  return 0;
}

// ---------------------------------------------------------------- embed

int run_embed(const Globals& g) {
  const Workspace ws{g.work_dir};
  const auto c = resolve_config(g, ws);
  const auto view = load_view(ws);
  auto embedder = load_embedder(c, ws);
  for (graph::NodeIndex u = 0; u < view.num_nodes(); ++u) (void)embedder->embed(view.nodes().text(u));
  for (const auto& e : view.interactions()) (void)embedder->embed(e.edge_text);
  std::size_t summaries = 0;
  for (bool scrambled : {false, true}) {
    if (!fs::exists(ws.summaries(scrambled))) continue;
    extract::SummaryStore store(ws.summaries(scrambled));
    for (const auto& r : store.records()) {
      (void)embedder->embed(r.summary);
      ++summaries;
    }
  }
  embedder->save(ws.embeddings());
  std::printf("%zu vectors (%zu new, %zu summaries read) -> %s\n", embedder->cache_size(),
              embedder->misses(), summaries, ws.embeddings().string().c_str());
  return 0;
}

// ---------------------------------------------------------------- train

struct TrainArgs {
  std::optional<std::uint64_t> seed;
};

int run_train(const Globals& g, const TrainArgs& a) {
  const Workspace ws{g.work_dir};
  const auto c = resolve_config(g, ws);
  const auto variant = model::variant_from_string(c.variant);
  const std::uint64_t seed = a.seed.value_or(c.seeds.front());
  auto view = load_view(ws);
  const auto chains = load_chains(c, ws, view, variant);
  const auto embedder = load_embedder(c, ws);
  const auto data = app::make_dataset(std::move(view), c);
  const embed::FeatureStore features(data.full, chains, *embedder);

  auto run = app::run_link_prediction(c, data, features, variant, seed,
                                      [](const train::EpochRecord& r) {
                                        if (r.val_mrr) {
                                          spdlog::info("epoch {} loss {:.4f} val MRR {:.4f}",
                                                       r.epoch, r.loss, *r.val_mrr);
                                        } else {
                                          spdlog::info("epoch {} loss {:.4f}", r.epoch, r.loss);
                                        }
                                      });
  app::CheckpointInfo info;
  info.config = c;
  info.config_hash = c.hash();
  info.data_hash = to_hex(data.full.content_hash());
  info.seed = seed;
  info.best_val_mrr = run.training.best_val_mrr;
  info.best_epoch = run.training.best_epoch;
  app::save_checkpoint(ws.checkpoint(), info, *run.model);
  app::write_train_log(ws.train_log(), run.training.log, seed, info.config_hash);
  std::printf("best validation MRR %.4f at epoch %zu; test MRR %.4f\n",
              run.training.best_val_mrr.value_or(0.0), run.training.best_epoch, run.test_mrr);
  std::printf("checkpoint -> %s\n", ws.checkpoint().string().c_str());
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  bool mrr = false;
  bool auc = false;
  bool inductive = false;
  bool allow_mismatch = false;
  std::string split = "test";
  std::string checkpoint;
  std::string labels;
  std::size_t max_queries = 0;
};

struct Loaded {
  app::Checkpoint ck;
  app::Dataset data;
  std::vector<extract::SummaryChain> chains;
  std::shared_ptr<embed::CachingEmbedder> embedder;
  std::unique_ptr<embed::FeatureStore> features;
};

Loaded load_trained(const Globals& g, const std::string& checkpoint, bool allow_mismatch) {
  const Workspace ws{g.work_dir};
  const fs::path path = checkpoint.empty() ? ws.checkpoint() : fs::path(checkpoint);
  require(path, "train");
  auto ck = app::load_checkpoint(path);
  auto view = load_view(ws);
  const auto view_hash = to_hex(view.content_hash());
  if (ck.info.data_hash != view_hash) {
    const std::string msg = "checkpoint was trained on data " + ck.info.data_hash +
                            " but the view has hash " + view_hash;
    if (!allow_mismatch) throw DataError(msg + " (pass --allow-mismatch to override)");
    spdlog::warn("{}", msg);
  }
  const auto meta = graph::load_view_metadata(ws.view());
  if (!meta.config_hash.empty() && meta.config_hash != ck.info.config_hash) {
    spdlog::info("view was ingested under config {}, checkpoint under {}", meta.config_hash,
                 ck.info.config_hash);
  }
  const auto& c = ck.info.config;
  const auto variant = model::variant_from_string(c.variant);
  Loaded out{std::move(ck), app::make_dataset(std::move(view), c), {}, nullptr, nullptr};
  out.chains = load_chains(c, ws, out.data.full, variant);
  out.embedder = load_embedder(c, ws);
  out.features = std::make_unique<embed::FeatureStore>(out.data.full, out.chains, *out.embedder);
  return out;
}

int run_eval(const Globals& g, const EvalArgs& a) {
  const Workspace ws{g.work_dir};
  if (a.mrr && a.auc) throw UsageError("choose one of --mrr and --auc");
  if (a.split != "test" && a.split != "val") throw UsageError("--split must be 'test' or 'val'");
  auto loaded = load_trained(g, a.checkpoint, a.allow_mismatch);
  const auto& c = loaded.ck.info.config;
  const model::RecentNeighbors neighbors(loaded.data.full, c.k);
  const train::LinkTask task{loaded.data.full, *loaded.features, neighbors};
  const auto seed = loaded.ck.info.seed;
  const auto hash = loaded.ck.info.config_hash;

  std::vector<app::MetricRecord> records;
  if (a.auc) {
    const fs::path labels_path = a.labels.empty() ? ws.synth() / "labels.csv" : fs::path(a.labels);
    require(labels_path, "synth");
    const auto labels = app::load_labels(labels_path, loaded.data.full);
    train::ClassifierOptions options;
    options.seed = seed;
    const auto result = train::evaluate_node_classification(*loaded.ck.model, task, labels, options);
    records.push_back({"node_classification", "transductive", seed, "auc", result.auc, hash, {}});
    std::printf("AUC %.4f (%zu train / %zu test nodes)\n", result.auc, result.train_size,
                result.test_size);
  } else {
    const auto& split = a.split == "val" ? loaded.data.split.val : loaded.data.split.test;
    train::MrrOptions options;
    options.num_negatives = c.num_negatives;
    options.seed = derive_seed(seed, a.split == "val" ? "validation" : "test");
    options.max_queries = a.max_queries;
    if (a.inductive) {
      const auto filtered = graph::inductive_filter(split, loaded.data.split.train);
      if (filtered.empty()) throw DataError("no " + a.split + " link touches a node unseen in training");
      const auto r = train::evaluate_mrr(*loaded.ck.model, task, filtered, options);
      records.push_back({"link_prediction", "inductive", seed, "mrr", r.mrr, hash, {}});
      std::printf("inductive %s MRR %.4f over %zu links\n", a.split.c_str(), r.mrr,
                  r.reciprocal_ranks.size());
    } else {
      const auto r = train::evaluate_mrr(*loaded.ck.model, task, split, options);
      records.push_back({"link_prediction", "transductive", seed, "mrr", r.mrr, hash, {}});
      std::printf("transductive %s MRR %.4f over %zu links\n", a.split.c_str(), r.mrr,
                  r.reciprocal_ranks.size());
    }
  }
  app::write_metrics(ws.metrics(), records, true);
  return 0;
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string rates = "0,0.1,0.2,0.3,0.4,0.5";
  std::string checkpoint;
  std::size_t max_queries = 0;
  bool allow_mismatch = false;
};

int run_perturb(const Globals& g, const PerturbArgs& a) {
  const Workspace ws{g.work_dir};
  const auto rates = parse_list(a.rates);
  auto loaded = load_trained(g, a.checkpoint, a.allow_mismatch);
  const auto& c = loaded.ck.info.config;
  const model::RecentNeighbors neighbors(loaded.data.full, c.k);
  const train::LinkTask task{loaded.data.full, *loaded.features, neighbors};
  const auto seed = loaded.ck.info.seed;
  train::MrrOptions options;
  options.num_negatives = c.num_negatives;
  options.seed = derive_seed(seed, "test");
  options.max_queries = a.max_queries;
  const auto rows = train::evaluate_robustness(*loaded.ck.model, task, loaded.data.split.test,
                                               rates, options, seed);
  std::ofstream out(ws.robustness());
  if (!out) throw DataError("cannot write '" + ws.robustness().string() + "'");
  std::vector<app::MetricRecord> records;
  std::printf("%-6s %-8s %-10s %-12s %-12s\n", "rate", "MRR", "replaced", "w_perturbed",
              "w_original");
  for (const auto& r : rows) {
    std::printf("%-6.2f %-8.4f %-10.4f %-12.5f %-12.5f\n", r.rate, r.mrr, r.replaced_fraction(),
                r.perturbed_weight, r.original_weight);
    out << json{{"rate", r.rate},
                {"mrr", r.mrr},
                {"neighbor_slots", r.neighbor_slots},
                {"replaced", r.replaced},
                {"perturbed_weight", r.perturbed_weight},
                {"original_weight", r.original_weight},
                {"seed", seed},
                {"config_hash", loaded.ck.info.config_hash}}
               .dump()
        << '\n';
    char label[32];
    std::snprintf(label, sizeof label, "p=%g", r.rate);
    records.push_back({"link_prediction", "transductive", seed, "mrr", r.mrr,
                       loaded.ck.info.config_hash, label});
  }
  app::write_metrics(ws.metrics(), records, true);
  return 0;
}

// ---------------------------------------------------------------- ablate

int run_ablate(const Globals& g) {
  const Workspace ws{g.work_dir};
  const auto c = resolve_config(g, ws);
  auto view = load_view(ws);
  require(ws.summaries(false), "extract");
  require(ws.summaries(true), "extract --scramble");
  const extract::SummaryStore chronological(ws.summaries(false));
  const extract::SummaryStore scrambled(ws.summaries(true));
  const auto embedder = load_embedder(c, ws);
  const auto data = app::make_dataset(std::move(view), c);
  const auto rows = app::run_ablation(c, data, *embedder, chronological, scrambled);
  std::vector<app::MetricRecord> records;
  std::printf("%-10s %-8s %-8s\n", "variant", "mean", "std");
  for (const auto& row : rows) {
    std::printf("%-10s %-8.4f %-8.4f\n", row.label.c_str(), row.report.mean(), row.report.stddev());
    const auto r = app::records_of(row.report, c.hash(), row.label);
    records.insert(records.end(), r.begin(), r.end());
  }
  app::write_metrics(ws.metrics(), records, true);
  return 0;
}

// ---------------------------------------------------------------- sweep-m

int run_sweep(const Globals& g, const std::string& values) {
  const Workspace ws{g.work_dir};
  const auto c = resolve_config(g, ws);
  std::vector<std::size_t> ms;
  for (double v : parse_list(values)) {
    if (v < 1 || v != static_cast<double>(static_cast<std::size_t>(v))) {
      throw UsageError("m values must be positive integers");
    }
    ms.push_back(static_cast<std::size_t>(v));
  }
  auto view = load_view(ws);
  const auto embedder = load_embedder(c, ws);
  const auto data = app::make_dataset(std::move(view), c);
  const auto rows = app::run_parameter_study(c, data, *embedder, ms);
  std::vector<app::MetricRecord> records;
  std::printf("%-4s %-18s %-8s %-8s %-8s\n", "m", "config", "calls", "mean", "std");
  for (const auto& row : rows) {
    std::printf("%-4zu %-18s %-8zu %-8.4f %-8.4f\n", row.m, row.config_hash.c_str(),
                row.llm_calls, row.report.mean(), row.report.stddev());
    const auto r = app::records_of(row.report, row.config_hash, "m=" + std::to_string(row.m));
    records.insert(records.end(), r.begin(), r.end());
  }
  app::write_metrics(ws.metrics(), records, true);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App cli{"Temporal text-attributed graph modeling with LLM reasoning chains"};
  cli.require_subcommand(1);
  cli.fallthrough();
  Globals g;
  cli.add_option("-w,--work-dir", g.work_dir, "Directory holding all artifacts")->capture_default_str();
  cli.add_option("-c,--config", g.config_path, "Config file (default: <work-dir>/config.json if present)");
  cli.add_option("--log-level", g.log_level, "trace|debug|info|warn|error|off")->capture_default_str();
  auto& o = g.over;
  cli.add_option("--d", o.d, "Embedding dimension");
  cli.add_option("--layers", o.layers, "Encoder layers L");
  cli.add_option("--m", o.m, "Maximum reasoning count");
  cli.add_option("--k", o.k, "Neighbors per node");
  cli.add_option("--batch-size", o.batch_size);
  cli.add_option("--lr", o.lr);
  cli.add_option("--epochs", o.epochs);
  cli.add_option("--patience", o.patience);
  cli.add_option("--eval-interval", o.eval_interval);
  cli.add_option("--num-negatives", o.num_negatives);
  cli.add_option("--threads", o.threads);
  cli.add_option("--variant", o.variant, "full|no_TSE|no_SC|no_CM|CM_all|no_TRC");
  cli.add_option("--embedder", o.embedder, "hash|precomputed");
  cli.add_option("--embedding-file", o.embedding_file);
  cli.add_option("--aggregation", o.aggregation, "sum|mean");
  cli.add_option("--seeds", o.seeds, "Seeds for multi-seed commands")->delimiter(',');
  cli.add_option("--deterministic", o.deterministic);

  SynthArgs synth;
  auto* synth_cmd = cli.add_subcommand("synth", "Generate a planted-signal synthetic graph");
  synth_cmd->add_option("--out", synth.out, "Output directory (default: <work-dir>/synth)");
  synth_cmd->add_option("--nodes", synth.config.nodes)->capture_default_str();
  synth_cmd->add_option("--edges", synth.config.edges)->capture_default_str();
  synth_cmd->add_option("--signal", synth.config.signal)->capture_default_str();
  synth_cmd->add_option("--seed", synth.config.seed)->capture_default_str();
  synth_cmd->add_option("--topics", synth.config.topics)->capture_default_str();
  synth_cmd->add_option("--timesteps", synth.config.timesteps)->capture_default_str();
  synth_cmd->add_option("--text-noise", synth.config.text_noise)->capture_default_str();
  synth_cmd->add_option("--drift-fraction", synth.config.drift_fraction)->capture_default_str();
  synth_cmd->add_option("--fillers-per-edge", synth.config.fillers_per_edge)->capture_default_str();
  synth_cmd->add_flag("!--no-ingest", synth.ingest, "Only write the CSV files");

  IngestArgs ingest;
  auto* ingest_cmd = cli.add_subcommand("ingest", "Freeze edge and node files into a view");
  ingest_cmd->add_option("--edges", ingest.edges, "src,dst,time,edge_text records")->required();
  ingest_cmd->add_option("--nodes", ingest.nodes, "node_id,node_text records")->required();

  ExtractArgs extract_args;
  auto* extract_cmd = cli.add_subcommand("extract", "Generate temporal reasoning chains");
  extract_cmd->add_flag("--mock", extract_args.mock, "Use the offline mock LLM");
  extract_cmd->add_flag("--scramble", extract_args.scramble, "Scramble chain order (no_TRC)");
  extract_cmd->add_option("--scramble-seed", extract_args.scramble_seed)->capture_default_str();

  auto* embed_cmd = cli.add_subcommand("embed", "Embed node, edge and summary texts");

  TrainArgs train_args;
  auto* train_cmd = cli.add_subcommand("train", "Train one model for link prediction");
  train_cmd->add_option("--seed", train_args.seed, "Seed (default: first configured seed)");

  EvalArgs eval_args;
  auto* eval_cmd = cli.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_flag("--mrr", eval_args.mrr, "Link-prediction MRR (default)");
  eval_cmd->add_flag("--auc", eval_args.auc, "Node-classification AUC");
  eval_cmd->add_flag("--inductive", eval_args.inductive, "Only links touching unseen nodes");
  eval_cmd->add_option("--split", eval_args.split, "test|val")->capture_default_str();
  eval_cmd->add_option("--checkpoint", eval_args.checkpoint);
  eval_cmd->add_option("--labels", eval_args.labels, "node_id,label file for --auc");
  eval_cmd->add_option("--max-queries", eval_args.max_queries);
  eval_cmd->add_flag("--allow-mismatch", eval_args.allow_mismatch,
                     "Evaluate even if the view hash differs from training");

  PerturbArgs perturb;
  auto* perturb_cmd = cli.add_subcommand("perturb", "Evaluate under neighbor perturbation");
  perturb_cmd->add_option("--rates", perturb.rates)->capture_default_str();
  perturb_cmd->add_option("--checkpoint", perturb.checkpoint);
  perturb_cmd->add_option("--max-queries", perturb.max_queries);
  perturb_cmd->add_flag("--allow-mismatch", perturb.allow_mismatch);

  auto* ablate_cmd = cli.add_subcommand("ablate", "Train and compare all six variants");

  std::string m_values = "1,2,4,8,16";
  auto* sweep_cmd = cli.add_subcommand("sweep-m", "Parameter study over m");
  sweep_cmd->add_option("--m-values", m_values)->capture_default_str();

  try {
    cli.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = cli.exit(e);
    return code == 0 ? 0 : static_cast<int>(ExitCode::kUsage);
  }

  try {
    spdlog::set_level(spdlog::level::from_str(g.log_level));
    if (*synth_cmd) return run_synth(g, synth);
    if (*ingest_cmd) return run_ingest(g, ingest);
    if (*extract_cmd) return run_extract(g, extract_args);
    if (*embed_cmd) return run_embed(g);
    if (*train_cmd) return run_train(g, train_args);
    if (*eval_cmd) return run_eval(g, eval_args);
    if (*perturb_cmd) return run_perturb(g, perturb);
    if (*ablate_cmd) return run_ablate(g);
    if (*sweep_cmd) return run_sweep(g, m_values);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return static_cast<int>(ExitCode::kData);
  }
  return static_cast<int>(ExitCode::kUsage);
}
