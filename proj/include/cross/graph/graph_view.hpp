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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cross::graph {

/// Dense node index assigned when a view is frozen.
using NodeIndex = std::uint32_t;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// One timestamped interaction (u, v, t) with its edge text.
struct TemporalInteraction {
  NodeIndex src = 0;
  NodeIndex dst = 0;
  double time = 0.0;
  std::string edge_text;
};

/// Snapshot of one node: its raw text and ascending interaction times.
struct NodeRecord {
  std::string id;
  std::string text;
  std::vector<double> timestamps;

  [[nodiscard]] std::size_t degree() const noexcept { return timestamps.size(); }
};

/// A sampled neighbor of some node: the counterparty, when, and through which edge.
struct Neighbor {
  NodeIndex node = 0;
  double time = 0.0;
  std::size_t edge = 0;  // index into the history view's interaction list
  bool replaced = false;  // set by perturb_neighbors
};

enum class SplitTag { kAll, kTrain, kVal, kTest };

std::string_view to_string(SplitTag tag);
SplitTag split_tag_from_string(std::string_view name);

enum class NeighborStrategy { kMostRecent };

/// Opaque string ids, their dense indices (lexicographic order), and raw texts.
/// Shared by every view derived from the same ingest so indices agree across splits.
class NodeTable {
 public:
  NodeTable(std::vector<std::string> ids, std::vector<std::string> texts);

  [[nodiscard]] std::size_t size() const noexcept { return ids_.size(); }
  [[nodiscard]] const std::string& id(NodeIndex u) const { return ids_.at(u); }
  [[nodiscard]] const std::string& text(NodeIndex u) const { return texts_.at(u); }
  [[nodiscard]] bool contains(std::string_view id) const;
  /// Throws DataError for an unknown id.
  [[nodiscard]] NodeIndex index_of(std::string_view id) const;

 private:
  std::vector<std::string> ids_;
  std::vector<std::string> texts_;
  std::unordered_map<std::string, NodeIndex> index_;
};

/// Frozen, time-sorted interaction log over a node table. Immutable after
/// construction and safe for concurrent readers.
class GraphView {
 public:
  /// `interactions` are stably sorted by time on construction.
  GraphView(std::shared_ptr<const NodeTable> nodes,
            std::vector<TemporalInteraction> interactions, SplitTag split = SplitTag::kAll);

  [[nodiscard]] std::span<const TemporalInteraction> interactions() const noexcept {
    return interactions_;
  }
  [[nodiscard]] const TemporalInteraction& interaction(std::size_t e) const {
    return interactions_.at(e);
  }
  [[nodiscard]] std::size_t num_interactions() const noexcept { return interactions_.size(); }
  [[nodiscard]] bool empty() const noexcept { return interactions_.empty(); }

  [[nodiscard]] const NodeTable& nodes() const noexcept { return *nodes_; }
  [[nodiscard]] const std::shared_ptr<const NodeTable>& node_table() const noexcept {
    return nodes_;
  }
  [[nodiscard]] std::size_t num_nodes() const noexcept { return nodes_->size(); }
  [[nodiscard]] SplitTag split() const noexcept { return split_; }

  /// Interaction times of `u` in this view, ascending (T_u). Self-loops count once.
  [[nodiscard]] std::span<const double> timestamps(NodeIndex u) const;
  /// Edge indices incident to `u`, ascending by time, parallel to timestamps(u).
  [[nodiscard]] std::span<const std::size_t> incident_edges(NodeIndex u) const;
  /// Number of incident edges of `u` strictly before `t`.
  [[nodiscard]] std::size_t count_before(NodeIndex u, double t) const;

  [[nodiscard]] NodeRecord node_record(NodeIndex u) const;

  /// Nodes that appear as an endpoint of at least one interaction, ascending.
  [[nodiscard]] std::vector<NodeIndex> active_nodes() const;
  /// Distinct destination nodes, ascending.
  [[nodiscard]] std::vector<NodeIndex> destination_nodes() const;

  /// Stable digest of the node table and interaction log.
  [[nodiscard]] std::uint64_t content_hash() const;

 private:
  void check_node(NodeIndex u) const;

  std::shared_ptr<const NodeTable> nodes_;
  std::vector<TemporalInteraction> interactions_;
  SplitTag split_;
  // CSR layout of incident edges per node.
  std::vector<std::size_t> offsets_;
  std::vector<std::size_t> incident_;
  std::vector<double> incident_times_;
};

/// H_u(t): interactions with u as src or dst and time strictly before t, ascending.
std::vector<TemporalInteraction> historical_interactions(NodeIndex u, double t,
                                                         const GraphView& view);

/// The k most recent interactions of u strictly before t, most recent last.
std::vector<Neighbor> recent_neighbors(NodeIndex u, double t, std::size_t k,
                                       const GraphView& view,
                                       NeighborStrategy strategy = NeighborStrategy::kMostRecent);

struct SplitRatios {
  double train = 0.6;
  double val = 0.2;
  double test = 0.2;
};

struct ChronologicalSplit {
  GraphView train;
  GraphView val;
  GraphView test;
};

/// Index-based split at floor(train*E) and floor((train+val)*E).
ChronologicalSplit chronological_split(const GraphView& view, SplitRatios ratios = {});

/// Keeps eval interactions with at least one endpoint never seen in `train_view`.
GraphView inductive_filter(const GraphView& eval_view, const GraphView& train_view);

/// Replaces exactly round(p * |neighbors|) neighbor ids, at uniformly chosen
/// positions, with uniform draws from `node_pool`. Times, edges and order are kept.
std::vector<Neighbor> perturb_neighbors(std::vector<Neighbor> neighbors, double p,
                                        std::mt19937_64& rng,
                                        std::span<const NodeIndex> node_pool);

}  // namespace cross::graph
