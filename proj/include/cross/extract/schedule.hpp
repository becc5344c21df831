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
#include <span>
#include <string>
#include <vector>

namespace cross::extract {

/// Reasoning timestamps of one node: the subset of its interaction times at
/// which the LLM summarizes the neighborhood.
struct ReasoningSchedule {
  std::string node;
  std::vector<double> times;  // strictly ascending
};

/// 1-based indices into T_u: i * ceil(n/m) for i = 1..m-1 (clamped to n),
/// then n itself; deduplicated, ascending. Empty when n == 0.
std::vector<std::size_t> reasoning_indices(std::size_t n, std::size_t m);

/// Applies reasoning_indices to an ascending timestamp list and drops
/// repeated timestamps. Throws DataError when m == 0.
ReasoningSchedule reasoning_timestamps(std::span<const double> timestamps, std::size_t m,
                                       std::string node = {});

}  // namespace cross::extract
