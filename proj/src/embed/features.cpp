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

#include "cross/embed/features.hpp"

#include <algorithm>

#include "cross/common/error.hpp"

namespace cross::embed {

SemanticSequence semantic_inputs(const extract::SummaryChain& chain, double t,
                                 const TextEmbedder& embedder, const TimeEncoder& encoder) {
  if (embedder.dim() != encoder.dim()) {
    throw UsageError("embedder and time encoder dimensions differ");
  }
  const auto entries = extract::summaries_before(chain, t);
  const auto d = embedder.dim();
  SemanticSequence seq;
  seq.node = chain.node();
  seq.query_time = t;
  seq.items.resize(static_cast<Eigen::Index>(entries.size()), 2 * d);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto row = static_cast<Eigen::Index>(i);
    seq.source_times.push_back(entries[i].time);
    seq.items.row(row).head(d) = embedder.embed(entries[i].text).transpose();
    seq.items.row(row).tail(d) = encoder.encode(t - entries[i].time).transpose();
  }
  return seq;
}

FeatureStore::FeatureStore(const graph::GraphView& history,
                           std::span<const extract::SummaryChain> chains,
                           const TextEmbedder& embedder) {
  const auto d = embedder.dim();
  const auto& nodes = history.nodes();
  if (chains.size() != nodes.size()) throw DataError("one summary chain per node is required");

  node_text_.resize(static_cast<Eigen::Index>(nodes.size()), d);
  for (graph::NodeIndex u = 0; u < nodes.size(); ++u) {
    node_text_.row(u) = embedder.embed(nodes.text(u)).transpose();
  }
  edge_text_.resize(static_cast<Eigen::Index>(history.num_interactions()), d);
  for (std::size_t e = 0; e < history.num_interactions(); ++e) {
    edge_text_.row(static_cast<Eigen::Index>(e)) =
        embedder.embed(history.interaction(e).edge_text).transpose();
  }
  chain_times_.resize(nodes.size());
  chain_embeddings_.resize(nodes.size());
  for (graph::NodeIndex u = 0; u < nodes.size(); ++u) {
    const auto& entries = chains[u].entries();
    auto& m = chain_embeddings_[u];
    m.resize(static_cast<Eigen::Index>(entries.size()), d);
    for (std::size_t i = 0; i < entries.size(); ++i) {
      chain_times_[u].push_back(entries[i].time);
      m.row(static_cast<Eigen::Index>(i)) = embedder.embed(entries[i].text).transpose();
    }
    max_chain_ = std::max(max_chain_, entries.size());
  }
}

std::size_t FeatureStore::chain_count_before(graph::NodeIndex u, double t) const {
  const auto& times = chain_times_.at(u);
  const auto before = std::lower_bound(times.begin(), times.end(), t) - times.begin();
  return std::max<std::size_t>(1, static_cast<std::size_t>(before));
}

}  // namespace cross::embed
