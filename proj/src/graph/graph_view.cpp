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

#include "cross/graph/graph_view.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/common/text.hpp"

namespace cross::graph {

std::string_view to_string(SplitTag tag) {
  switch (tag) {
    case SplitTag::kAll: return "all";
    case SplitTag::kTrain: return "train";
    case SplitTag::kVal: return "val";
    case SplitTag::kTest: return "test";
  }
  return "all";
}

SplitTag split_tag_from_string(std::string_view name) {
  if (name == "all") return SplitTag::kAll;
  if (name == "train") return SplitTag::kTrain;
  if (name == "val") return SplitTag::kVal;
  if (name == "test") return SplitTag::kTest;
  throw DataError("unknown split tag '" + std::string(name) + "'");
}

NodeTable::NodeTable(std::vector<std::string> ids, std::vector<std::string> texts)
    : ids_(std::move(ids)), texts_(std::move(texts)) {
  if (ids_.size() != texts_.size()) throw DataError("node table: ids/texts size mismatch");
  index_.reserve(ids_.size());
  for (std::size_t i = 0; i < ids_.size(); ++i) {
    if (!index_.emplace(ids_[i], static_cast<NodeIndex>(i)).second) {
      throw DataError("node table: duplicate id '" + ids_[i] + "'");
    }
  }
}

bool NodeTable::contains(std::string_view id) const {
  return index_.find(std::string(id)) != index_.end();
}

NodeIndex NodeTable::index_of(std::string_view id) const {
  auto it = index_.find(std::string(id));
  if (it == index_.end()) throw DataError("unknown node '" + std::string(id) + "'");
  return it->second;
}

GraphView::GraphView(std::shared_ptr<const NodeTable> nodes,
                     std::vector<TemporalInteraction> interactions, SplitTag split)
    : nodes_(std::move(nodes)), interactions_(std::move(interactions)), split_(split) {
  if (!nodes_) throw DataError("graph view requires a node table");
  std::stable_sort(interactions_.begin(), interactions_.end(),
                   [](const auto& a, const auto& b) { return a.time < b.time; });

  const std::size_t n = nodes_->size();
  std::vector<std::size_t> counts(n + 1, 0);
  for (const auto& e : interactions_) {
    if (e.src >= n || e.dst >= n) throw DataError("interaction references a missing node");
    if (!(e.time >= 0.0) || !std::isfinite(e.time)) {
      throw DataError("interaction time must be finite and non-negative");
    }
    ++counts[e.src + 1];
    if (e.dst != e.src) ++counts[e.dst + 1];
  }
  offsets_.assign(n + 1, 0);
  std::partial_sum(counts.begin(), counts.end(), offsets_.begin());
  incident_.resize(offsets_.back());
  incident_times_.resize(offsets_.back());
  std::vector<std::size_t> cursor(offsets_.begin(), offsets_.end() - 1);
  for (std::size_t e = 0; e < interactions_.size(); ++e) {
    const auto& it = interactions_[e];
    auto place = [&](NodeIndex u) {
      incident_[cursor[u]] = e;
      incident_times_[cursor[u]] = it.time;
      ++cursor[u];
    };
    place(it.src);
    if (it.dst != it.src) place(it.dst);
  }
}

void GraphView::check_node(NodeIndex u) const {
  if (u >= nodes_->size()) throw DataError("unknown node index " + std::to_string(u));
}

std::span<const double> GraphView::timestamps(NodeIndex u) const {
  check_node(u);
  return {incident_times_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

std::span<const std::size_t> GraphView::incident_edges(NodeIndex u) const {
  check_node(u);
  return {incident_.data() + offsets_[u], offsets_[u + 1] - offsets_[u]};
}

std::size_t GraphView::count_before(NodeIndex u, double t) const {
  auto times = timestamps(u);
  return static_cast<std::size_t>(std::lower_bound(times.begin(), times.end(), t) -
                                  times.begin());
}

NodeRecord GraphView::node_record(NodeIndex u) const {
  auto times = timestamps(u);
  return NodeRecord{nodes_->id(u), nodes_->text(u), {times.begin(), times.end()}};
}

std::vector<NodeIndex> GraphView::active_nodes() const {
  std::vector<NodeIndex> out;
  for (NodeIndex u = 0; u < nodes_->size(); ++u) {
    if (offsets_[u + 1] > offsets_[u]) out.push_back(u);
  }
  return out;
}

std::vector<NodeIndex> GraphView::destination_nodes() const {
  std::vector<char> seen(nodes_->size(), 0);
  for (const auto& e : interactions_) seen[e.dst] = 1;
  std::vector<NodeIndex> out;
  for (NodeIndex u = 0; u < seen.size(); ++u) {
    if (seen[u] != 0) out.push_back(u);
  }
  return out;
}

std::uint64_t GraphView::content_hash() const {
  std::uint64_t h = fnv1a64("cross-view-v1");
  auto feed = [&h](std::string_view s) {
    h = fnv1a64(s, h);
    h = fnv1a64(std::string_view("\x1f", 1), h);
  };
  for (NodeIndex u = 0; u < nodes_->size(); ++u) {
    feed(nodes_->id(u));
    feed(nodes_->text(u));
  }
  for (const auto& e : interactions_) {
    feed(std::to_string(e.src));
    feed(std::to_string(e.dst));
    feed(format_time(e.time));
    feed(e.edge_text);
  }
  return h;
}

std::vector<TemporalInteraction> historical_interactions(NodeIndex u, double t,
                                                         const GraphView& view) {
  const std::size_t count = view.count_before(u, t);
  auto edges = view.incident_edges(u);
  std::vector<TemporalInteraction> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(view.interaction(edges[i]));
  return out;
}

std::vector<Neighbor> recent_neighbors(NodeIndex u, double t, std::size_t k,
                                       const GraphView& view, NeighborStrategy strategy) {
  if (k == 0) throw DataError("neighbor sample size must be at least 1");
  (void)strategy;  // kMostRecent is the only strategy
  const std::size_t count = view.count_before(u, t);
  const std::size_t first = count > k ? count - k : 0;
  auto edges = view.incident_edges(u);
  std::vector<Neighbor> out;
  out.reserve(count - first);
  for (std::size_t i = first; i < count; ++i) {
    const auto& e = view.interaction(edges[i]);
    out.push_back(Neighbor{e.src == u ? e.dst : e.src, e.time, edges[i], false});
  }
  return out;
}

ChronologicalSplit chronological_split(const GraphView& view, SplitRatios ratios) {
  const double sum = ratios.train + ratios.val + ratios.test;
  if (std::abs(sum - 1.0) > 1e-9 || ratios.train < 0 || ratios.val < 0 || ratios.test < 0) {
    throw DataError("split ratios must be non-negative and sum to 1");
  }
  if (view.empty()) throw DataError("cannot split an empty graph");
  const auto total = static_cast<double>(view.num_interactions());
  // The epsilon absorbs representation error such as 0.6 * 10 = 5.999...
  const auto first = static_cast<std::size_t>(std::floor(ratios.train * total + 1e-9));
  const auto second =
      static_cast<std::size_t>(std::floor((ratios.train + ratios.val) * total + 1e-9));
  auto all = view.interactions();
  auto slice = [&](std::size_t lo, std::size_t hi, SplitTag tag) {
    return GraphView(view.node_table(), {all.begin() + lo, all.begin() + hi}, tag);
  };
  return ChronologicalSplit{slice(0, first, SplitTag::kTrain),
                            slice(first, second, SplitTag::kVal),
                            slice(second, all.size(), SplitTag::kTest)};
}

GraphView inductive_filter(const GraphView& eval_view, const GraphView& train_view) {
  std::vector<char> seen(train_view.num_nodes(), 0);
  for (const auto& e : train_view.interactions()) {
    seen[e.src] = 1;
    seen[e.dst] = 1;
  }
  std::vector<TemporalInteraction> kept;
  for (const auto& e : eval_view.interactions()) {
    const bool src_new = e.src >= seen.size() || seen[e.src] == 0;
    const bool dst_new = e.dst >= seen.size() || seen[e.dst] == 0;
    if (src_new || dst_new) kept.push_back(e);
  }
  return GraphView(eval_view.node_table(), std::move(kept), eval_view.split());
}

std::vector<Neighbor> perturb_neighbors(std::vector<Neighbor> neighbors, double p,
                                        std::mt19937_64& rng,
                                        std::span<const NodeIndex> node_pool) {
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("perturbation rate must lie in [0, 1]");
  const auto replace =
      static_cast<std::size_t>(std::lround(p * static_cast<double>(neighbors.size())));
  if (replace == 0) return neighbors;
  if (node_pool.empty()) throw DataError("perturbation needs a non-empty node pool");

  std::vector<std::size_t> positions(neighbors.size());
  std::iota(positions.begin(), positions.end(), std::size_t{0});
  // Partial Fisher-Yates: the first `replace` slots are a uniform subset.
  for (std::size_t i = 0; i < replace; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, positions.size() - 1);
    std::swap(positions[i], positions[pick(rng)]);
  }
  std::uniform_int_distribution<std::size_t> draw(0, node_pool.size() - 1);
  for (std::size_t i = 0; i < replace; ++i) {
    auto& n = neighbors[positions[i]];
    n.node = node_pool[draw(rng)];
    n.replaced = true;
  }
  return neighbors;
}

}  // namespace cross::graph
