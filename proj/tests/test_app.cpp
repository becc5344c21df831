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

#include <gtest/gtest.h>

#include <fstream>
#include <iterator>
#include <sstream>

#include "cross/app/checkpoint.hpp"
#include "cross/app/config.hpp"
#include "cross/app/experiment.hpp"
#include "cross/app/report.hpp"
#include "cross/app/synth.hpp"
#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/graph/io.hpp"
#include "fixtures.hpp"

namespace cross::app {
namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

TEST(Config, JsonRoundTrip) {
  ExperimentConfig c;
  c.d = 32;
  c.lr = 3e-4;
  c.seeds = {4, 5};
  c.variant = "no_CM";
  c.llm.model = "other";
  const auto back = ExperimentConfig::from_json(c.to_json());
  EXPECT_EQ(back.to_json(), c.to_json());
  EXPECT_EQ(back.hash(), c.hash());
  EXPECT_EQ(back.seeds, c.seeds);
}

TEST(Config, HashCoversResultFieldsOnly) {
  ExperimentConfig a;
  ExperimentConfig b;
  b.seeds = {9};
  b.threads = 4;
  b.llm.max_in_flight = 2;
  EXPECT_EQ(a.hash(), b.hash());
  b.lr = 2e-4;
  EXPECT_NE(a.hash(), b.hash());
  ExperimentConfig c;
  c.m = 4;
  EXPECT_NE(a.hash(), c.hash());
  EXPECT_EQ(a.hash().size(), 16u);
}

TEST(Config, MissingKeysKeepDefaults) {
  const auto c = ExperimentConfig::from_json(R"({"d": 16, "llm": {"model": "x"}})");
  EXPECT_EQ(c.d, 16u);
  EXPECT_EQ(c.m, ExperimentConfig{}.m);
  EXPECT_EQ(c.llm.model, "x");
  EXPECT_EQ(c.llm.max_attempts, LlmSettings{}.max_attempts);
}

TEST(Config, RejectsUnknownAndInvalid) {
  EXPECT_THROW(ExperimentConfig::from_json(R"({"dd": 1})"), UsageError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"llm": {"modle": "x"}})"), UsageError);
  EXPECT_THROW(ExperimentConfig::from_json("[1]"), UsageError);
  EXPECT_THROW(ExperimentConfig::from_json("{"), UsageError);
  EXPECT_THROW(ExperimentConfig::from_json(R"({"d": "wide"})"), UsageError);
  ExperimentConfig c;
  c.lr = 0;
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.aggregation = "max";
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.seeds.clear();
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.embedder = "precomputed";
  EXPECT_THROW(c.validate(), UsageError);
  c = {};
  c.d = 3;
  c.heads = 4;
  EXPECT_THROW(c.validate(), UsageError);
}

TEST(Config, FileRoundTrip) {
  const auto dir = testing::scratch_dir("config");
  ExperimentConfig c;
  c.k = 7;
  c.save(dir / "config.json");
  EXPECT_EQ(ExperimentConfig::load(dir / "config.json").k, 7u);
  EXPECT_THROW(ExperimentConfig::load(dir / "absent.json"), UsageError);
}

TEST(Config, EncoderConfigMapping) {
  ExperimentConfig c;
  c.d = 16;
  c.m = 3;
  c.variant = "CM_all";
  c.aggregation = "mean";
  const auto e = c.encoder_config(7);
  EXPECT_EQ(e.dim, 16);
  EXPECT_EQ(e.max_items, 4u);
  EXPECT_EQ(e.variant, model::Variant::kCMAll);
  EXPECT_EQ(e.aggregation, model::Aggregation::kMean);
  EXPECT_EQ(e.seed, derive_seed(7, "init"));
  EXPECT_NE(c.encoder_config(8).seed, e.seed);
}

TEST(Synth, FixedSeedIsByteIdentical) {
  SynthConfig c;
  c.nodes = 40;
  c.edges = 400;
  const auto a = testing::scratch_dir("synth_a");
  const auto b = testing::scratch_dir("synth_b");
  write_synth(synth_graph(c), a);
  write_synth(synth_graph(c), b);
  for (const char* f : {"edges.csv", "nodes.csv", "labels.csv", "draw_log.csv"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    EXPECT_FALSE(slurp(a / f).empty()) << f;
  }
  c.seed = 1;
  write_synth(synth_graph(c), b);
  EXPECT_NE(slurp(a / "edges.csv"), slurp(b / "edges.csv"));
}

TEST(Synth, PlantedSignalDominatesAfterDrift) {
  SynthConfig c;  // N = 200, E = 5000, signal 1.0
  const auto data = synth_graph(c);
  EXPECT_EQ(data.draws.size(), 5000u);
  // Counted directly over the draw log.
  std::size_t post = 0;
  std::size_t matched = 0;
  for (const auto& d : data.draws) {
    if (!d.post_drift) continue;
    ++post;
    matched += d.matched ? 1 : 0;
  }
  ASSERT_GT(post, 1000u);
  EXPECT_GE(static_cast<double>(matched) / static_cast<double>(post), 0.8);
  EXPECT_DOUBLE_EQ(post_drift_match_rate(data),
                   static_cast<double>(matched) / static_cast<double>(post));
}

TEST(Synth, ZeroSignalIsNullModel) {
  SynthConfig c;
  c.signal = 0.0;
  const auto data = synth_graph(c);
  // Partners are uniform over active nodes, so matches happen at about the
  // rate two random nodes share a topic.
  const double rate = post_drift_match_rate(data);
  EXPECT_NEAR(rate, 1.0 / static_cast<double>(c.topics), 0.03);
}

TEST(Synth, NodesDriftOnceAndTextNamesInitialTopic) {
  SynthConfig c;
  c.nodes = 50;
  c.edges = 500;
  const auto data = synth_graph(c);
  for (const auto& n : data.nodes) {
    EXPECT_NE(n.initial_topic, n.final_topic);
    EXPECT_GE(n.drift_time, 1.0);
    EXPECT_LE(n.drift_time, static_cast<double>(c.timesteps));
    EXPECT_NE(n.text.find(data.topic_words[n.initial_topic][0]), std::string::npos);
  }
}

TEST(Synth, RejectsTinyGraphs) {
  SynthConfig c;
  c.nodes = 5;
  EXPECT_THROW(synth_graph(c), UsageError);
  c.nodes = 20;
  c.edges = 10;
  EXPECT_THROW(synth_graph(c), UsageError);
  c.edges = 100;
  c.signal = 1.5;
  EXPECT_THROW(synth_graph(c), UsageError);
}

TEST(Checkpoint, RoundTripWithOptimizer) {
  const auto dir = testing::scratch_dir("ckpt");
  ExperimentConfig c;
  c.d = 8;
  c.m = 4;
  c.heads = 2;
  train::Model model(c.encoder_config(3));
  testing::jitter(model.params, 1);
  nn::AdamOptions opt;
  nn::Adam adam(model.params, opt);
  nn::GradientBuffer g(model.params);
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    const auto& v = model.params[i].value;
    g.add(i, nn::Matrix::Constant(v.rows(), v.cols(), 0.1));
  }
  adam.step(g);

  CheckpointInfo info;
  info.config = c;
  info.config_hash = c.hash();
  info.data_hash = "00000000000000ff";
  info.seed = 3;
  info.best_val_mrr = 0.25;
  info.best_epoch = 4;
  info.optimizer_steps = adam.steps();
  save_checkpoint(dir / "m.ckpt", info, model, &adam);

  const auto loaded = load_checkpoint(dir / "m.ckpt");
  EXPECT_EQ(loaded.info.config_hash, c.hash());
  EXPECT_EQ(loaded.info.data_hash, "00000000000000ff");
  EXPECT_EQ(loaded.info.best_val_mrr, 0.25);
  EXPECT_EQ(loaded.info.best_epoch, 4u);
  EXPECT_EQ(loaded.info.optimizer_steps, 1u);
  ASSERT_EQ(loaded.model->params.size(), model.params.size());
  for (std::size_t i = 0; i < model.params.size(); ++i) {
    EXPECT_EQ(loaded.model->params[i].value, model.params[i].value) << model.params[i].name;
  }
  ASSERT_TRUE(loaded.has_optimizer);
  EXPECT_EQ(loaded.first_moments[0], adam.first_moments()[0]);
  EXPECT_EQ(loaded.second_moments.back(), adam.second_moments().back());

  const auto header = read_checkpoint_info(dir / "m.ckpt");
  EXPECT_EQ(header.seed, 3u);
}

TEST(Checkpoint, RejectsCorruptFiles) {
  const auto dir = testing::scratch_dir("ckpt_bad");
  ExperimentConfig c;
  c.d = 4;
  train::Model model(c.encoder_config(0));
  CheckpointInfo info;
  info.config = c;
  info.config_hash = c.hash();
  save_checkpoint(dir / "ok.ckpt", info, model);
  const auto bytes = slurp(dir / "ok.ckpt");

  std::ofstream(dir / "magic.ckpt", std::ios::binary) << "NOTACKPT" << bytes.substr(8);
  EXPECT_THROW(load_checkpoint(dir / "magic.ckpt"), DataError);
  std::ofstream(dir / "short.ckpt", std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  EXPECT_THROW(load_checkpoint(dir / "short.ckpt"), DataError);
  std::ofstream(dir / "long.ckpt", std::ios::binary) << bytes << "xxxxxxxx";
  EXPECT_THROW(load_checkpoint(dir / "long.ckpt"), DataError);
  EXPECT_THROW(load_checkpoint(dir / "absent.ckpt"), DataError);
  EXPECT_FALSE(load_checkpoint(dir / "ok.ckpt").has_optimizer);
}

TEST(Report, MetricsRoundTripAndAppend) {
  const auto dir = testing::scratch_dir("metrics");
  train::MetricsReport r{"link_prediction", "transductive", "mrr", {0, 1}, {0.5, 0.25}};
  const auto records = records_of(r, "abcd", "CROSS");
  ASSERT_EQ(records.size(), 2u);
  write_metrics(dir / "m.jsonl", records);
  write_metrics(dir / "m.jsonl", records, true);
  const auto back = read_metrics(dir / "m.jsonl");
  ASSERT_EQ(back.size(), 4u);
  EXPECT_EQ(back[1].seed, 1u);
  EXPECT_EQ(back[1].value, 0.25);
  EXPECT_EQ(back[1].label, "CROSS");
  EXPECT_EQ(back[1].config_hash, "abcd");
  write_metrics(dir / "m.jsonl", records);
  EXPECT_EQ(read_metrics(dir / "m.jsonl").size(), 2u);
}

TEST(Report, BadLineIsParseError) {
  const auto dir = testing::scratch_dir("metrics_bad");
  std::ofstream(dir / "m.jsonl") << to_json_line({"t", "s", 0, "mrr", 0.1, "h", ""}) << "\n{oops\n";
  try {
    (void)read_metrics(dir / "m.jsonl");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
}

TEST(Report, TrainLogLines) {
  const auto dir = testing::scratch_dir("trainlog");
  std::vector<train::EpochRecord> log{{1, 1.5, std::nullopt, 0.1}, {2, 1.0, 0.2, 0.1}};
  write_train_log(dir / "log.jsonl", log, 3, "hh");
  std::ifstream in(dir / "log.jsonl");
  std::string first;
  std::string second;
  std::getline(in, first);
  std::getline(in, second);
  EXPECT_NE(first.find("\"val_mrr\":null"), std::string::npos);
  EXPECT_NE(second.find("\"val_mrr\":0.2"), std::string::npos);
  EXPECT_NE(second.find("\"config_hash\":\"hh\""), std::string::npos);
}

TEST(Labels, LoadsAndValidates) {
  const auto dir = testing::scratch_dir("labels");
  std::istringstream edges("a,b,1,x\n");
  std::istringstream nodes("a,t\nb,u\n");
  const auto view = graph::ingest(edges, nodes);
  std::ofstream(dir / "ok.csv") << "# node_id,label\na,1\nb,0\n";
  const auto labels = load_labels(dir / "ok.csv", view);
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[0].node, view.nodes().index_of("a"));
  EXPECT_EQ(labels[0].label, 1);
  std::ofstream(dir / "bad.csv") << "a,1\nb,7\n";
  EXPECT_THROW(load_labels(dir / "bad.csv", view), ParseError);
  std::ofstream(dir / "unknown.csv") << "zz,1\n";
  EXPECT_THROW(load_labels(dir / "unknown.csv", view), ParseError);
}

TEST(Experiment, VariantChains) {
  const testing::Prepared p(testing::synth_view(testing::small_synth(), "chains"), 4, 5, 8);
  const auto base = variant_chains(p.view, 4, model::Variant::kNoTSE, p.store, nullptr);
  for (const auto& c : base) EXPECT_EQ(c.entries().size(), 1u);
  const auto full = variant_chains(p.view, 4, model::Variant::kFull, p.store, nullptr);
  std::size_t longest = 0;
  for (const auto& c : full) longest = std::max(longest, c.entries().size());
  EXPECT_EQ(longest, 5u);
  EXPECT_THROW(variant_chains(p.view, 4, model::Variant::kNoTRC, p.store, nullptr), UsageError);
}

TEST(Experiment, AblationLabels) {
  EXPECT_EQ(ablation_label(model::Variant::kFull), "CROSS");
  EXPECT_EQ(ablation_label(model::Variant::kNoTSE), "w/o TSE");
}

}  // namespace
}  // namespace cross::app
