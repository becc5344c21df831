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
#include <vector>

#include "cross/graph/graph_view.hpp"

namespace cross::model {

/// Supplies N_u(t) for the structural layer at a given depth.
class NeighborProvider {
 public:
  virtual ~NeighborProvider() = default;
  [[nodiscard]] virtual std::vector<graph::Neighbor> neighbors(graph::NodeIndex u, double t,
                                                               std::size_t layer) const = 0;
};

/// The k most recent interactions before t in a history view.
class RecentNeighbors final : public NeighborProvider {
 public:
  RecentNeighbors(const graph::GraphView& history, std::size_t k);

  [[nodiscard]] std::vector<graph::Neighbor> neighbors(graph::NodeIndex u, double t,
                                                       std::size_t layer) const override;

 private:
  const graph::GraphView* history_;
  std::size_t k_;
};

/// Wraps another provider and replaces round(p * |N|) neighbor ids with
/// uniform draws from `pool`. The draw for (u, t, layer) is seeded from those
/// values alone, so it does not depend on evaluation order.
class PerturbedNeighbors final : public NeighborProvider {
 public:
  PerturbedNeighbors(const NeighborProvider& inner, double p, std::uint64_t seed,
                     std::vector<graph::NodeIndex> pool);

  [[nodiscard]] std::vector<graph::Neighbor> neighbors(graph::NodeIndex u, double t,
                                                       std::size_t layer) const override;

 private:
  const NeighborProvider* inner_;
  double p_;
  std::uint64_t seed_;
  std::vector<graph::NodeIndex> pool_;
};

}  // namespace cross::model
