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

#include "cross/extract/schedule.hpp"

#include <algorithm>

#include "cross/common/error.hpp"

namespace cross::extract {

std::vector<std::size_t> reasoning_indices(std::size_t n, std::size_t m) {
  if (m == 0) throw DataError("maximum reasoning count m must be at least 1");
  std::vector<std::size_t> out;
  if (n == 0) return out;
  const std::size_t interval = (n + m - 1) / m;
  out.reserve(m);
  for (std::size_t i = 1; i < m; ++i) {
    const std::size_t index = std::min(i * interval, n);
    if (out.empty() || out.back() != index) out.push_back(index);
  }
  if (out.empty() || out.back() != n) out.push_back(n);
  return out;
}

ReasoningSchedule reasoning_timestamps(std::span<const double> timestamps, std::size_t m,
                                       std::string node) {
  ReasoningSchedule schedule{std::move(node), {}};
  for (std::size_t index : reasoning_indices(timestamps.size(), m)) {
    const double t = timestamps[index - 1];
    if (schedule.times.empty() || schedule.times.back() < t) schedule.times.push_back(t);
  }
  return schedule;
}

}  // namespace cross::extract
