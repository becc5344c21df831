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

#include <span>
#include <string>
#include <vector>

#include "cross/embed/text_embedder.hpp"
#include "cross/embed/time_encoder.hpp"
#include "cross/extract/summary_store.hpp"
#include "cross/graph/graph_view.hpp"

namespace cross::embed {

/// x_u(t_k) = embed(d̂_u(t_k)) ∥ Phi(t - t_k) for every chain entry before t.
struct SemanticSequence {
  std::string node;
  double query_time = 0.0;
  std::vector<double> source_times;  // ascending, all < query_time
  Eigen::MatrixXd items;             // one row of width 2d per source time
};

SemanticSequence semantic_inputs(const extract::SummaryChain& chain, double t,
                                 const TextEmbedder& embedder, const TimeEncoder& encoder);

/// Embedded texts the co-encoder reads: raw node texts, edge texts of the
/// history view, and every node's summary chain. Immutable once built.
class FeatureStore {
 public:
  /// `chains` is indexed by dense node index of `history`.
  FeatureStore(const graph::GraphView& history, std::span<const extract::SummaryChain> chains,
               const TextEmbedder& embedder);

  [[nodiscard]] Eigen::Index dim() const noexcept { return node_text_.cols(); }
  [[nodiscard]] const Eigen::MatrixXd& node_text() const noexcept { return node_text_; }
  [[nodiscard]] const Eigen::MatrixXd& edge_text() const noexcept { return edge_text_; }

  [[nodiscard]] std::span<const double> chain_times(graph::NodeIndex u) const {
    return chain_times_.at(u);
  }
  [[nodiscard]] const Eigen::MatrixXd& chain_embeddings(graph::NodeIndex u) const {
    return chain_embeddings_.at(u);
  }
  /// Number of chain entries with time < t; the base entry always counts.
  [[nodiscard]] std::size_t chain_count_before(graph::NodeIndex u, double t) const;
  /// Longest chain over all nodes.
  [[nodiscard]] std::size_t max_chain_length() const noexcept { return max_chain_; }

 private:
  Eigen::MatrixXd node_text_;
  Eigen::MatrixXd edge_text_;
  std::vector<std::vector<double>> chain_times_;
  std::vector<Eigen::MatrixXd> chain_embeddings_;
  std::size_t max_chain_ = 0;
};

}  // namespace cross::embed
