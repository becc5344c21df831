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
#include <string>
#include <vector>

namespace cross::app {

struct SynthConfig {
  std::size_t nodes = 200;
  std::size_t edges = 5000;
  double signal = 1.0;  // probability a link picks a same-current-topic partner
  std::uint64_t seed = 0;
  std::size_t topics = 10;
  std::size_t timesteps = 100;     // integer timestamps 1..timesteps
  double text_noise = 0.3;         // chance an edge names a random topic's word
  double late_fraction = 0.15;     // nodes that only join at 60-90% of the timeline
  double drift_fraction = 1.0;     // nodes whose topic switches during the timeline
  std::size_t filler_words = 2000;
  std::size_t fillers_per_edge = 3;
};

/// One generated link, as recorded by the generator.
struct SynthDraw {
  std::string src;
  std::string dst;
  double time = 0.0;
  bool matched = false;     // dst's current topic equals src's current topic
  bool post_drift = false;  // src had already drifted at this time
};

struct SynthNode {
  std::string id;
  std::string text;
  std::size_t initial_topic = 0;
  std::size_t final_topic = 0;
  double drift_time = 0.0;
  double active_from = 0.0;
};

struct SynthDataset {
  std::vector<SynthNode> nodes;
  std::vector<SynthDraw> draws;
  std::vector<std::string> edge_texts;  // parallel to draws
  std::vector<std::vector<std::string>> topic_words;
};

/// Planted-signal temporal text-attributed graph. Every node holds a latent
/// topic that switches once at a uniform random time; its text names only
/// the initial topic. Edge texts name the source's current topic (or, with
/// probability text_noise, a random one) among filler words.
SynthDataset synth_graph(const SynthConfig& config);

/// Writes edges.csv, nodes.csv, labels.csv (1 when the final topic is in the
/// lower half) and draw_log.csv into `dir`.
void write_synth(const SynthDataset& data, const std::filesystem::path& dir);

/// Fraction of post-drift draws that are topic-matched.
double post_drift_match_rate(const SynthDataset& data);

}  // namespace cross::app
