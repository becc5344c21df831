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

#include <algorithm>
#include <cstddef>
#include <set>
#include <span>
#include <vector>

// Brute-force reference computations, written independently of the library.

namespace cross::testing {

/// Reasoning indices by enumeration: every multiple of ceil(n/m) below m
/// steps, clamped to n, plus n itself.
inline std::set<std::size_t> schedule_oracle(std::size_t n, std::size_t m) {
  std::set<std::size_t> out;
  if (n == 0) return out;
  std::size_t step = 0;
  while (step * m < n) ++step;  // ceil(n/m) by counting
  for (std::size_t i = 1; i < m; ++i) out.insert(std::min(n, i * step));
  out.insert(n);
  return out;
}

/// Rank of the positive (index 0) by sorting all candidates descending and
/// averaging the 1-based positions of its tied block.
inline double rank_oracle(double positive, std::span<const double> negatives) {
  std::vector<double> all{positive};
  all.insert(all.end(), negatives.begin(), negatives.end());
  std::sort(all.begin(), all.end(), [](double a, double b) { return a > b; });
  std::size_t first = 0;
  while (all[first] != positive) ++first;
  std::size_t last = first;
  while (last + 1 < all.size() && all[last + 1] == positive) ++last;
  return (static_cast<double>(first + 1) + static_cast<double>(last + 1)) / 2.0;
}

/// Fraction of (positive, negative) pairs ordered correctly, ties counting half.
inline double auc_pairwise(std::span<const double> scores, std::span<const int> labels) {
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (labels[i] != 1) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j] != 0) continue;
      pairs += 1.0;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / pairs;
}

/// Expected reciprocal rank when the positive is uniformly placed among
/// negatives + 1 candidates: H(n) / n.
inline double uniform_rank_mrr(std::size_t negatives) {
  const std::size_t n = negatives + 1;
  double h = 0.0;
  for (std::size_t r = 1; r <= n; ++r) h += 1.0 / static_cast<double>(r);
  return h / static_cast<double>(n);
}

}  // namespace cross::testing
