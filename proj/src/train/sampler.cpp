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

#include "cross/train/sampler.hpp"

#include <algorithm>

#include "cross/common/error.hpp"

namespace cross::train {

NegativeSampler::NegativeSampler(std::vector<graph::NodeIndex> pool, std::uint64_t seed)
    : pool_(std::move(pool)), rng_(seed) {
  if (pool_.empty()) throw DataError("negative sampling pool is empty");
  pick_ = std::uniform_int_distribution<std::size_t>(0, pool_.size() - 1);
}

graph::NodeIndex NegativeSampler::sample(graph::NodeIndex exclude) {
  if (std::all_of(pool_.begin(), pool_.end(), [&](auto v) { return v == exclude; })) {
    throw DataError("negative sampling pool contains only the true destination");
  }
  for (;;) {
    const auto v = pool_[pick_(rng_)];
    if (v != exclude) return v;
  }
}

}  // namespace cross::train
