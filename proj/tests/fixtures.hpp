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

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "cross/app/experiment.hpp"
#include "cross/app/synth.hpp"
#include "cross/embed/features.hpp"
#include "cross/embed/text_embedder.hpp"
#include "cross/extract/chain_runner.hpp"
#include "cross/graph/io.hpp"
#include "cross/model/neighbors.hpp"
#include "cross/train/trainer.hpp"

namespace cross::testing {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cross_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

/// Generates a synthetic graph and ingests it through the CSV path.
inline graph::GraphView synth_view(const app::SynthConfig& config, const std::string& name) {
  const auto dir = scratch_dir("synth_" + name);
  app::write_synth(app::synth_graph(config), dir);
  return graph::ingest_files(dir / "edges.csv", dir / "nodes.csv");
}

inline app::SynthConfig small_synth(std::uint64_t seed = 0) {
  app::SynthConfig c;
  c.nodes = 30;
  c.edges = 300;
  c.timesteps = 30;
  c.topics = 4;
  c.seed = seed;
  return c;
}

/// Summaries, features and neighbor sampling for one view.
struct Prepared {
  Prepared(graph::GraphView v, std::size_t m, std::size_t k, Eigen::Index d,
           model::Variant variant = model::Variant::kFull)
      : view(std::move(v)), embedder(d) {
    app::ExperimentConfig config;
    config.m = m;
    app::extract_with_mock(view, app::chain_options(config, extract::ChainOrder::kChronological),
                           store);
    chains = app::variant_chains(view, m, variant, store, nullptr);
    features = std::make_unique<embed::FeatureStore>(view, chains, embedder);
    neighbors = std::make_unique<model::RecentNeighbors>(view, k);
  }

  /// Same summaries, different interaction log (same node table).
  Prepared(const Prepared& base, graph::GraphView v, std::size_t k)
      : view(std::move(v)), embedder(base.embedder), chains(base.chains) {
    features = std::make_unique<embed::FeatureStore>(view, chains, embedder);
    neighbors = std::make_unique<model::RecentNeighbors>(view, k);
  }

  [[nodiscard]] train::LinkTask task() const { return {view, *features, *neighbors}; }

  graph::GraphView view;
  embed::HashEmbedder embedder;
  extract::SummaryStore store;
  std::vector<extract::SummaryChain> chains;
  std::unique_ptr<embed::FeatureStore> features;
  std::unique_ptr<model::RecentNeighbors> neighbors;
};

inline model::EncoderConfig small_encoder(model::Variant variant = model::Variant::kFull,
                                          std::uint64_t seed = 0) {
  model::EncoderConfig c;
  c.dim = 8;
  c.layers = 2;
  c.neighbors = 5;
  c.heads = 2;
  c.ffn_multiplier = 2;
  c.variant = variant;
  c.max_items = 5;
  c.seed = seed;
  return c;
}

/// Adds Gaussian noise to every parameter, so that zero-initialized parts
/// (mixer output, phases) take part in gradient checks. Large noise saturates
/// the head, and BCE on p near 1 then loses digits in 1 - p.
inline void jitter(nn::ParameterSet& params, std::uint64_t seed, double scale = 0.05) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, scale);
  for (std::size_t i = 0; i < params.size(); ++i) {
    auto& v = params[i].value;
    for (Eigen::Index j = 0; j < v.size(); ++j) v.data()[j] += n(rng);
  }
}

/// Positives at one late timestamp with random negatives.
struct Batch {
  std::vector<graph::TemporalInteraction> positives;
  std::vector<graph::NodeIndex> negatives;
};

inline Batch late_batch(const graph::GraphView& view, std::size_t count) {
  const auto edges = view.interactions();
  const double t = edges[edges.size() * 4 / 5].time;
  Batch b;
  std::mt19937_64 rng(17);
  for (const auto& e : edges) {
    if (e.time == t && b.positives.size() < count) {
      b.positives.push_back(e);
      b.negatives.push_back(static_cast<graph::NodeIndex>(rng() % view.num_nodes()));
    }
  }
  return b;
}

/// The view with every interaction at time >= t rewritten: new edge text,
/// random destination, and time pushed later by a random amount.
inline graph::GraphView mutate_future(const graph::GraphView& view, double t, std::uint64_t seed,
                                      bool text_only) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<graph::NodeIndex> node(
      0, static_cast<graph::NodeIndex>(view.num_nodes() - 1));
  std::uniform_real_distribution<double> shift(0.0, 5.0);
  std::vector<graph::TemporalInteraction> edges(view.interactions().begin(),
                                                view.interactions().end());
  for (auto& e : edges) {
    if (e.time < t) continue;
    e.edge_text = "mutated " + std::to_string(rng() % 1000) + " " + e.edge_text;
    if (!text_only) {
      e.dst = node(rng);
      e.time += shift(rng);
    }
  }
  return graph::GraphView(view.node_table(), std::move(edges));
}

}  // namespace cross::testing
