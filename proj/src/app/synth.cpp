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

#include "cross/app/synth.hpp"

#include <algorithm>
#include <fstream>
#include <random>
#include <set>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/common/text.hpp"
#include "cross/graph/io.hpp"

namespace cross::app {
namespace {

constexpr std::array<std::string_view, 16> kOnsets{"b", "d", "f", "g", "k", "l", "m", "n",
                                                   "p", "r", "s", "t", "v", "z", "br", "st"};
constexpr std::array<std::string_view, 6> kVowels{"a", "e", "i", "o", "u", "ai"};

/// Distinct pseudo-words of three syllables.
std::vector<std::string> make_words(std::size_t count, std::mt19937_64& rng,
                                    std::set<std::string>& used) {
  std::uniform_int_distribution<std::size_t> onset(0, kOnsets.size() - 1);
  std::uniform_int_distribution<std::size_t> vowel(0, kVowels.size() - 1);
  std::vector<std::string> words;
  while (words.size() < count) {
    std::string w;
    for (int s = 0; s < 3; ++s) {
      w += kOnsets[onset(rng)];
      w += kVowels[vowel(rng)];
    }
    if (used.insert(w).second) words.push_back(std::move(w));
  }
  return words;
}

std::string node_id(std::size_t i) {
  std::string id = std::to_string(i);
  return "n" + std::string(4 - std::min<std::size_t>(4, id.size()), '0') + id;
}

}  // namespace

SynthDataset synth_graph(const SynthConfig& c) {
  if (c.nodes < 10) throw UsageError("synthetic graph needs at least 10 nodes");
  if (c.edges < c.nodes) throw UsageError("synthetic graph needs at least as many edges as nodes");
  if (c.topics < 2) throw UsageError("synthetic graph needs at least 2 topics");
  if (c.timesteps < 1) throw UsageError("synthetic graph needs at least 1 timestep");
  if (c.signal < 0.0 || c.signal > 1.0 || c.text_noise < 0.0 || c.text_noise > 1.0 ||
      c.late_fraction < 0.0 || c.late_fraction > 1.0 || c.drift_fraction < 0.0 ||
      c.drift_fraction > 1.0) {
    throw UsageError("signal, noise, late and drift fractions must lie in [0, 1]");
  }

  std::mt19937_64 vocab_rng(derive_seed(c.seed, "synth.vocabulary"));
  std::mt19937_64 rng(derive_seed(c.seed, "synth.graph"));
  std::set<std::string> used;
  SynthDataset data;
  for (std::size_t k = 0; k < c.topics; ++k) data.topic_words.push_back(make_words(3, vocab_rng, used));
  const auto fillers = make_words(c.filler_words, vocab_rng, used);

  const auto horizon = static_cast<double>(c.timesteps);
  std::uniform_int_distribution<std::size_t> any_topic(0, c.topics - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < c.nodes; ++i) {
    SynthNode node;
    node.id = node_id(i);
    node.initial_topic = any_topic(rng);
    node.final_topic = (node.initial_topic + 1 + any_topic(rng) % (c.topics - 1)) % c.topics;
    node.drift_time = 1.0 + std::floor(unit(rng) * horizon);
    if (unit(rng) >= c.drift_fraction) {
      node.final_topic = node.initial_topic;
      node.drift_time = horizon + 1.0;
    }
    node.active_from = unit(rng) < c.late_fraction
                           ? std::floor(horizon * (0.6 + 0.3 * unit(rng)))
                           : 0.0;
    const auto& w = data.topic_words[node.initial_topic];
    node.text = "profile mentions " + w[0] + " " + w[1] + " " + w[2];
    data.nodes.push_back(std::move(node));
  }
  auto topic_at = [&](std::size_t u, double t) {
    const auto& n = data.nodes[u];
    return t >= n.drift_time ? n.final_topic : n.initial_topic;
  };

  std::uniform_int_distribution<std::size_t> word_pick(0, 2);
  std::uniform_int_distribution<std::size_t> filler_pick(0, fillers.size() - 1);
  std::vector<std::size_t> active;
  std::vector<std::size_t> same;
  for (std::size_t e = 0; e < c.edges; ++e) {
    // Spread edges evenly over timesteps 1..T.
    const double t = 1.0 + std::floor(static_cast<double>(e) * horizon / static_cast<double>(c.edges));
    active.clear();
    for (std::size_t u = 0; u < c.nodes; ++u) {
      if (data.nodes[u].active_from <= t) active.push_back(u);
    }
    std::uniform_int_distribution<std::size_t> pick_active(0, active.size() - 1);
    const std::size_t src = active[pick_active(rng)];
    const std::size_t topic = topic_at(src, t);
    std::size_t dst = src;
    if (unit(rng) < c.signal) {
      same.clear();
      for (auto v : active) {
        if (v != src && topic_at(v, t) == topic) same.push_back(v);
      }
      if (!same.empty()) {
        std::uniform_int_distribution<std::size_t> pick_same(0, same.size() - 1);
        dst = same[pick_same(rng)];
      }
    }
    while (dst == src) dst = active[pick_active(rng)];

    const std::size_t text_topic = unit(rng) < c.text_noise ? any_topic(rng) : topic;
    std::string text = data.topic_words[text_topic][word_pick(rng)];
    for (std::size_t f = 0; f < c.fillers_per_edge; ++f) text += " " + fillers[filler_pick(rng)];

    data.draws.push_back({data.nodes[src].id, data.nodes[dst].id, t, topic_at(dst, t) == topic,
                          t >= data.nodes[src].drift_time});
    data.edge_texts.push_back(std::move(text));
  }
  return data;
}

void write_synth(const SynthDataset& data, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto open = [&](const char* name) {
    std::ofstream out(dir / name);
    if (!out) throw DataError("cannot write '" + (dir / name).string() + "'");
    return out;
  };
  {
    auto out = open("edges.csv");
    out << "# src,dst,time,edge_text\n";
    for (std::size_t i = 0; i < data.draws.size(); ++i) {
      const auto& d = data.draws[i];
      out << d.src << ',' << d.dst << ',' << format_time(d.time) << ','
          << graph::quote_field(data.edge_texts[i]) << '\n';
    }
  }
  {
    auto out = open("nodes.csv");
    out << "# node_id,node_text\n";
    for (const auto& n : data.nodes) out << n.id << ',' << graph::quote_field(n.text) << '\n';
  }
  const std::size_t topics = data.topic_words.size();
  {
    auto out = open("labels.csv");
    out << "# node_id,label\n";
    for (const auto& n : data.nodes) out << n.id << ',' << (n.final_topic < topics / 2 ? 1 : 0) << '\n';
  }
  {
    auto out = open("draw_log.csv");
    out << "# src,dst,time,matched,post_drift\n";
    for (const auto& d : data.draws) {
      out << d.src << ',' << d.dst << ',' << format_time(d.time) << ',' << int{d.matched} << ','
          << int{d.post_drift} << '\n';
    }
  }
}

double post_drift_match_rate(const SynthDataset& data) {
  std::size_t post = 0;
  std::size_t matched = 0;
  for (const auto& d : data.draws) {
    if (!d.post_drift) continue;
    ++post;
    matched += d.matched ? 1 : 0;
  }
  return post == 0 ? 0.0 : static_cast<double>(matched) / static_cast<double>(post);
}

}  // namespace cross::app
