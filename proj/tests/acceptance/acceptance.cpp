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

// Acceptance suite. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails. Tolerances are fixed below.

#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "../fixtures.hpp"
#include "../gradcheck.hpp"
#include "../oracles.hpp"
#include "cross/app/report.hpp"
#include "cross/common/hash.hpp"
#include "cross/extract/mock_llm.hpp"
#include "cross/extract/schedule.hpp"
#include "cross/nn/autodiff.hpp"
#include "cross/train/metrics.hpp"

namespace cross {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kScheduleBudgetS = 5.0;
constexpr int kCausalQueries = 100;
constexpr int kReextractQueries = 10;
constexpr double kGradTol = 1e-4;
constexpr std::size_t kGradCoords = 20;
constexpr double kGradStep = 1e-5;
constexpr double kSoftmaxTol = 1e-9;
constexpr double kLearningMargin = 0.05;
constexpr double kLearningBudgetS = 15.0 * 60.0;
constexpr double kDominantMatchRate = 0.8;
constexpr std::size_t kInFlightBound = 3;
constexpr double kRandomMrr = 0.0514;
constexpr double kRandomMrrTol = 0.02;
constexpr std::size_t kRandomQueries = 1000;

struct Outcome {
  bool pass = true;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* format, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, a);
  return buf;
}

/// The N = 200, E = 5000 planted-signal graph, shared by several criteria.
const graph::GraphView& synthetic() {
  static const graph::GraphView view = testing::synth_view(app::SynthConfig{}, "acceptance");
  return view;
}

void mock_summaries(const graph::GraphView& view, const app::ExperimentConfig& c,
                    extract::SummaryStore& store,
                    extract::ChainOrder order = extract::ChainOrder::kChronological) {
  (void)app::extract_with_mock(view, app::chain_options(c, order), store);
}

Outcome schedule_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1000);
  std::uniform_int_distribution<std::size_t> nd(1, 300);
  std::uniform_int_distribution<std::size_t> md(1, 32);
  std::uniform_real_distribution<double> gap(0.01, 3.0);
  std::size_t bad = 0;
  for (int c = 0; c < 1000; ++c) {
    const auto n = nd(rng);
    const auto m = md(rng);
    std::vector<double> times(n);
    double t = 0.0;
    for (auto& x : times) x = (t += gap(rng));

    const auto idx = extract::reasoning_indices(n, m);
    const auto expected = testing::schedule_oracle(n, m);
    const auto s = extract::reasoning_timestamps(times, m);
    bool ok = std::vector<std::size_t>(expected.begin(), expected.end()) == idx;
    ok = ok && s.times.size() <= std::min(m, n) && s.times.back() == times.back();
    for (std::size_t i = 0; ok && i < s.times.size(); ++i) {
      ok = std::binary_search(times.begin(), times.end(), s.times[i]) &&
           s.times[i] == times[idx[i] - 1];
    }
    if (ok && n >= m) {
      const std::size_t step = (n + m - 1) / m;
      for (std::size_t i = 1; i + 1 < idx.size(); ++i) ok = ok && idx[i] - idx[i - 1] == step;
    }
    bad += ok ? 0 : 1;
  }
  const double secs = seconds_since(t0);
  return {bad == 0 && secs < kScheduleBudgetS,
          std::to_string(1000 - bad) + "/1000 cases match the oracle in " + fmt("%.3f s", secs)};
}

nn::Matrix encode_one(const train::Model& model, const train::LinkTask& task, graph::NodeIndex u,
                      double t) {
  const std::vector<std::pair<graph::NodeIndex, double>> q{{u, t}};
  return train::encode_at(model, task, q);
}

Outcome causality() {
  const testing::Prepared base(synthetic(), 8, 10, 16);
  auto config = testing::small_encoder();
  config.dim = 16;
  config.neighbors = 10;
  config.max_items = 9;
  train::Model model(config);
  testing::jitter(model.params, 2);
  std::mt19937_64 rng(100);
  const auto edges = base.view.interactions();
  int fixed_ok = 0;
  for (int q = 0; q < kCausalQueries; ++q) {
    const auto& e = edges[rng() % edges.size()];
    const auto u = (rng() % 2) ? e.src : e.dst;
    const auto before = encode_one(model, base.task(), u, e.time);
    const testing::Prepared mutated(base, testing::mutate_future(base.view, e.time, rng(), false),
                                    10);
    fixed_ok += before == encode_one(model, mutated.task(), u, e.time) ? 1 : 0;
  }
  // Re-extracting summaries after future text rewrites.
  int reextract_ok = 0;
  for (int q = 0; q < kReextractQueries; ++q) {
    const auto& e = edges[edges.size() / 4 + rng() % (edges.size() / 2)];
    const testing::Prepared mutated(testing::mutate_future(base.view, e.time, rng(), true), 8, 10,
                                    16);
    const auto before = encode_one(model, base.task(), e.src, e.time);
    reextract_ok += before == encode_one(model, mutated.task(), e.src, e.time) ? 1 : 0;
  }
  return {fixed_ok == kCausalQueries && reextract_ok == kReextractQueries,
          std::to_string(fixed_ok) + "/" + std::to_string(kCausalQueries) +
              " bit-identical under future rewrites, " + std::to_string(reextract_ok) + "/" +
              std::to_string(kReextractQueries) + " after re-extraction"};
}

Outcome gradients() {
  const auto view = testing::synth_view(testing::small_synth(), "acceptance_grad");
  const testing::Prepared p(view, 4, 5, 8);
  const auto task = p.task();
  const auto batch = testing::late_batch(p.view, 4);
  const std::vector<std::pair<const char*, const char*>> components{
      {"time encoder", "^time\\."},
      {"semantic", "^layer[0-9]+\\.semantic\\."},
      {"structural", "^layer[0-9]+\\.(structural|backbone)\\."},
      {"mixer", "^layer[0-9]+\\.mixer\\."},
      {"output", "^output\\."},
      {"head", "^head\\."}};
  Outcome out;
  for (std::size_t c = 0; c < components.size(); ++c) {
    train::Model model(testing::small_encoder());
    testing::jitter(model.params, 99);
    const auto r = testing::check_parameters(
        model.params,
        [&](nn::ParameterScope& s) {
          return train::batch_loss(model, s, task, batch.positives, batch.negatives);
        },
        testing::ids_matching(model.params, components[c].second), kGradCoords, 1234 + c,
        kGradStep);
    const bool ok = r.checked == kGradCoords && r.worst_relative < kGradTol;
    out.pass = out.pass && ok;
    out.detail += std::string(c ? ", " : "") + components[c].first + fmt(" %.1e", r.worst_relative);
  }
  out.detail = "worst relative error: " + out.detail;
  return out;
}

Outcome oracles() {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<int> coarse(0, 6);
  int mrr_ok = 0;
  for (int c = 0; c < 50; ++c) {
    std::vector<double> negs(1 + rng() % 120);
    for (auto& s : negs) s = coarse(rng) / 6.0;
    const double pos = coarse(rng) / 6.0;
    mrr_ok += train::reciprocal_rank(pos, negs) == 1.0 / testing::rank_oracle(pos, negs) ? 1 : 0;
  }
  int auc_ok = 0;
  for (int c = 0; c < 200; ++c) {
    const std::size_t n = 2 + rng() % 60;
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = coarse(rng) / 6.0;
      labels[i] = static_cast<int>(rng() % 2);
    }
    labels[0] = 0;
    labels[1] = 1;
    auc_ok += train::roc_auc(scores, labels) == testing::auc_pairwise(scores, labels) ? 1 : 0;
  }
  double worst = 0.0;
  for (int c = 0; c < 100; ++c) {
    const auto width = 1 + static_cast<nn::Index>(rng() % 50);
    const auto logits = testing::random_matrix(4, width, rng, 30.0);
    const auto s = nn::softmax_rows(nn::constant(logits)).value();
    for (nn::Index r = 0; r < s.rows(); ++r) {
      worst = std::max(worst, std::abs(s.row(r).sum() - 1.0));
    }
  }
  return {mrr_ok == 50 && auc_ok == 200 && worst <= kSoftmaxTol,
          "MRR " + std::to_string(mrr_ok) + "/50, AUC " + std::to_string(auc_ok) +
              "/200, softmax max |sum - 1| " + fmt("%.1e", worst)};
}

Outcome learning() {
  const auto t0 = Clock::now();
  app::SynthConfig sc;
  sc.topics = 25;
  const auto dir = testing::scratch_dir("acceptance_learning");
  app::write_synth(app::synth_graph(sc), dir);

  // Precondition, read back from the draw log file.
  std::ifstream log(dir / "draw_log.csv");
  std::string line;
  std::size_t post = 0;
  std::size_t matched = 0;
  while (std::getline(log, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (line.back() != '1') continue;  // post_drift is the last column
    ++post;
    matched += line[line.size() - 3] == '1' ? 1 : 0;
  }
  const double rate = post ? static_cast<double>(matched) / static_cast<double>(post) : 0.0;
  std::printf("     draw log: %zu of %zu post-drift links topic-matched (%.3f)\n", matched, post,
              rate);

  app::ExperimentConfig c;
  c.d = 64;
  c.layers = 2;
  c.m = 8;
  c.k = 10;
  c.batch_size = 50;
  c.lr = 1e-3;
  c.epochs = 20;
  c.eval_interval = 1;
  c.patience = 20;
  const auto data = app::make_dataset(graph::ingest_files(dir / "edges.csv", dir / "nodes.csv"), c);
  const auto embedder = app::make_embedder(c);
  extract::SummaryStore store;
  mock_summaries(data.full, c, store);

  double mean[2] = {0.0, 0.0};
  const model::Variant variants[2] = {model::Variant::kFull, model::Variant::kNoTSE};
  for (int v = 0; v < 2; ++v) {
    const auto chains = app::variant_chains(data.full, c.m, variants[v], store, nullptr);
    const embed::FeatureStore features(data.full, chains, *embedder);
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
      const auto run = app::run_link_prediction(c, data, features, variants[v], seed);
      std::printf("     %-6s seed %llu: test MRR %.4f\n", model::to_string(variants[v]).data(),
                  static_cast<unsigned long long>(seed), run.test_mrr);
      std::fflush(stdout);
      mean[v] += run.test_mrr / 3.0;
    }
  }
  const double margin = mean[0] - mean[1];
  const double secs = seconds_since(t0);
  return {rate >= kDominantMatchRate && margin >= kLearningMargin && secs < kLearningBudgetS,
          "full " + fmt("%.4f", mean[0]) + " vs no_TSE " + fmt("%.4f", mean[1]) + ", margin " +
              fmt("%+.4f", margin) + " (need >= 0.05), " + fmt("%.0f s", secs)};
}

Outcome ablation() {
  const auto view = testing::synth_view(testing::small_synth(), "acceptance_ablation");
  const testing::Prepared p(view, 4, 5, 8);
  const auto task = p.task();
  train::Model full(testing::small_encoder(model::Variant::kFull, 11));
  train::Model no_cm(testing::small_encoder(model::Variant::kNoCM, 11));
  testing::jitter(full.params, 8);
  for (std::size_t l = 0; l < full.encoder.config().layers; ++l) {
    full.encoder.mixer(l)->reset_to_identity();
  }
  for (std::size_t i = 0; i < no_cm.params.size(); ++i) {
    no_cm.params[i].value = full.params.find(no_cm.params[i].name)->value;
  }
  std::vector<graph::NodeIndex> nodes;
  for (graph::NodeIndex u = 0; u < p.view.num_nodes(); ++u) nodes.push_back(u);
  bool equal = true;
  {
    nn::NoGradGuard guard;
    for (double t : {0.0, 5.0, 17.5, 31.0}) {
      nn::ParameterScope s1;
      nn::ParameterScope s2;
      const auto a = full.encoder.encode(s1, {task.features, task.neighbors}, nodes, t).value();
      const auto b = no_cm.encoder.encode(s2, {task.features, task.neighbors}, nodes, t).value();
      equal = equal && a == b;
    }
  }

  app::ExperimentConfig c;
  c.d = 8;
  c.m = 4;
  c.k = 5;
  c.heads = 2;
  c.epochs = 1;
  c.batch_size = 100;
  c.seeds = {0};
  const auto data = app::make_dataset(p.view, c);
  extract::SummaryStore chrono;
  mock_summaries(data.full, c, chrono);
  extract::SummaryStore scrambled;
  mock_summaries(data.full, c, scrambled, extract::ChainOrder::kScrambled);
  const auto rows = app::run_ablation(c, data, *app::make_embedder(c), chrono, scrambled);
  const std::vector<std::string> expected{"CROSS",   "w/o TSE", "w/o SC",
                                          "w/o CM",  "w/o TRC", "w/ CM_all"};
  bool rows_ok = rows.size() == expected.size();
  for (std::size_t i = 0; rows_ok && i < rows.size(); ++i) {
    rows_ok = rows[i].label == expected[i] && rows[i].report.values.size() == 1;
  }
  return {equal && rows_ok, std::string("no_CM ") + (equal ? "==" : "!=") +
                                " full with identity mixer; ablate emitted " +
                                std::to_string(rows.size()) + " rows"};
}

Outcome extractor_accounting() {
  const auto& view = synthetic();
  const std::size_t m = 8;
  std::size_t expected = 0;
  for (graph::NodeIndex u = 0; u < view.num_nodes(); ++u) {
    const auto ts = view.timestamps(u);
    std::set<double> times;
    for (auto i : testing::schedule_oracle(ts.size(), m)) {
      if (ts[i - 1] > 0.0) times.insert(ts[i - 1]);
    }
    expected += times.size();
  }
  extract::ChainOptions options;
  options.m = m;
  extract::SummaryStore store;
  auto mock = std::make_shared<extract::MockLlm>();
  extract::LlmClient client(mock, {});
  const auto first = extract::run_chain(view, options, client, store);
  auto again_mock = std::make_shared<extract::MockLlm>();
  extract::LlmClient again_client(again_mock, {});
  (void)extract::run_chain(view, options, again_client, store);

  extract::SummaryStore bounded_store;
  auto slow = std::make_shared<extract::MockLlm>(
      extract::MockLlm::Options{std::chrono::microseconds(300), {}, 6});
  extract::LlmClientOptions bounded;
  bounded.max_in_flight = kInFlightBound;
  extract::LlmClient bounded_client(slow, bounded);
  options.max_in_flight = 8;  // more workers than slots
  (void)extract::run_chain(view, options, bounded_client, bounded_store);

  const bool ok = mock->requests() == expected && first.generated == expected &&
                  expected <= m * view.num_nodes() && again_mock->requests() == 0 &&
                  slow->peak_in_flight() <= kInFlightBound && slow->requests() == expected;
  return {ok, std::to_string(mock->requests()) + " calls (oracle " + std::to_string(expected) +
                  ", bound " + std::to_string(m * view.num_nodes()) + "), rerun " +
                  std::to_string(again_mock->requests()) + " calls, peak in flight " +
                  std::to_string(slow->peak_in_flight()) + " of " +
                  std::to_string(kInFlightBound)};
}

/// Synthesis through evaluation for seed 0; returns the metrics file bytes.
std::string train_and_eval(const std::string& name) {
  const auto dir = testing::scratch_dir(name);
  app::write_synth(app::synth_graph(app::SynthConfig{}), dir);
  app::ExperimentConfig c;
  c.d = 16;
  c.k = 10;
  c.epochs = 3;
  c.eval_interval = 1;
  c.batch_size = 100;
  c.seeds = {0};
  c.deterministic = true;
  const auto data = app::make_dataset(graph::ingest_files(dir / "edges.csv", dir / "nodes.csv"), c);
  extract::SummaryStore store;
  mock_summaries(data.full, c, store);
  const auto chains = app::variant_chains(data.full, c.m, model::Variant::kFull, store, nullptr);
  const embed::FeatureStore features(data.full, chains, *app::make_embedder(c));
  const auto run = app::run_link_prediction(c, data, features, model::Variant::kFull, 0);
  std::vector<app::MetricRecord> records{
      {"link_prediction", "transductive", 0, "mrr", run.test_mrr, c.hash(), {}},
      {"link_prediction", "inductive", 0, "mrr", run.inductive_mrr.value_or(-1.0), c.hash(), {}}};
  for (const auto& e : run.training.log) {
    const auto epoch = "epoch " + std::to_string(e.epoch);
    records.push_back({"training", epoch, 0, "loss", e.loss, c.hash(), {}});
    if (e.val_mrr) records.push_back({"training", epoch, 0, "val_mrr", *e.val_mrr, c.hash(), {}});
  }
  app::write_metrics(dir / "metrics.jsonl", records);
  std::ifstream in(dir / "metrics.jsonl", std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  const auto a = train_and_eval("acceptance_det_a");
  const auto b = train_and_eval("acceptance_det_b");
  return {!a.empty() && a == b, std::to_string(a.size()) + " report bytes, runs " +
                                    (a == b ? "bit-identical" : "differ")};
}

Outcome random_baseline() {
  app::ExperimentConfig c;
  c.d = 64;
  c.k = 10;
  const auto data = app::make_dataset(synthetic(), c);
  extract::SummaryStore store;
  mock_summaries(data.full, c, store);
  const auto chains = app::variant_chains(data.full, c.m, model::Variant::kFull, store, nullptr);
  const embed::FeatureStore features(data.full, chains, *app::make_embedder(c));
  const model::RecentNeighbors neighbors(data.full, c.k);
  const train::Model model(c.encoder_config(0));

  // Validation and test links together.
  std::vector<graph::TemporalInteraction> tail(data.split.val.interactions().begin(),
                                               data.split.val.interactions().end());
  tail.insert(tail.end(), data.split.test.interactions().begin(),
              data.split.test.interactions().end());
  const graph::GraphView eval(data.full.node_table(), std::move(tail));
  train::MrrOptions options;
  options.num_negatives = 100;
  options.seed = 9;
  const auto r = train::evaluate_mrr(model, {data.full, features, neighbors}, eval, options);
  const double expected = testing::uniform_rank_mrr(100);
  return {r.reciprocal_ranks.size() >= kRandomQueries &&
              std::abs(r.mrr - kRandomMrr) <= kRandomMrrTol,
          "untrained MRR " + fmt("%.4f", r.mrr) + " over " +
              std::to_string(r.reciprocal_ranks.size()) + " queries (uniform rank " +
              fmt("%.4f", expected) + ")"};
}

}  // namespace
}  // namespace cross

int main() {
  using namespace cross;
  spdlog::set_level(spdlog::level::warn);
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"schedule", schedule_suite},    {"causality", causality},
      {"gradients", gradients},        {"oracles", oracles},
      {"learning", learning},          {"ablation", ablation},
      {"extractor", extractor_accounting}, {"determinism", determinism},
      {"random-mrr", random_baseline}};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    std::printf("%s %zu %-11s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
              criteria.size());
  return failed == 0 ? 0 : 1;
}
