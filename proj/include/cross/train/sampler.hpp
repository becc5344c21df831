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
#include <random>
#include <vector>

#include "cross/graph/graph_view.hpp"

namespace cross::train {

/// Uniform draws from a candidate pool that never return the excluded node.
class NegativeSampler {
 public:
  NegativeSampler(std::vector<graph::NodeIndex> pool, std::uint64_t seed);

  /// Throws DataError if the pool holds nothing but `exclude`.
  graph::NodeIndex sample(graph::NodeIndex exclude);

  [[nodiscard]] const std::vector<graph::NodeIndex>& pool() const noexcept { return pool_; }
  void reseed(std::uint64_t seed) { rng_.seed(seed); }

 private:
  std::vector<graph::NodeIndex> pool_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> pick_;
};

}  // namespace cross::train
