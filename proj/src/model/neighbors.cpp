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

#include "cross/model/neighbors.hpp"

#include <bit>
#include <random>

#include "cross/common/hash.hpp"

namespace cross::model {

RecentNeighbors::RecentNeighbors(const graph::GraphView& history, std::size_t k)
    : history_(&history), k_(k) {}

std::vector<graph::Neighbor> RecentNeighbors::neighbors(graph::NodeIndex u, double t,
                                                        std::size_t /*layer*/) const {
  return graph::recent_neighbors(u, t, k_, *history_);
}

PerturbedNeighbors::PerturbedNeighbors(const NeighborProvider& inner, double p,
                                       std::uint64_t seed, std::vector<graph::NodeIndex> pool)
    : inner_(&inner), p_(p), seed_(seed), pool_(std::move(pool)) {}

std::vector<graph::Neighbor> PerturbedNeighbors::neighbors(graph::NodeIndex u, double t,
                                                           std::size_t layer) const {
  auto base = inner_->neighbors(u, t, layer);
  std::mt19937_64 rng(derive_seed(seed_, u, mix64(std::bit_cast<std::uint64_t>(t)) ^ layer));
  return graph::perturb_neighbors(std::move(base), p_, rng, pool_);
}

}  // namespace cross::model
