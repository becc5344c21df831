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
#include <vector>

#include "cross/extract/llm_client.hpp"
#include "cross/extract/prompt.hpp"
#include "cross/extract/summary_store.hpp"
#include "cross/graph/graph_view.hpp"

namespace cross::extract {

enum class ChainOrder {
  kChronological,
  /// Summaries are generated in a seeded random order of reasoning times and
  /// each is filed under a permuted time, destroying the chronology of the chain.
  kScrambled,
};

struct ChainOptions {
  std::size_t m = 8;
  PromptTemplate prompt = PromptTemplate::standard();
  std::size_t max_in_flight = 8;  // worker fan-out across nodes
  ChainOrder order = ChainOrder::kChronological;
  std::uint64_t scramble_seed = 0;
};

struct ChainReport {
  std::size_t scheduled = 0;  // sum over nodes of |T̂_u| (excluding t̂ = 0)
  std::size_t generated = 0;  // summaries produced by this run
  std::size_t cached = 0;     // summaries already present
  double elapsed_s = 0.0;
};

/// Generates every missing summary d̂_u(t̂) for t̂ in each node's reasoning
/// schedule. Requests for one node are issued sequentially; nodes fan out over
/// up to max_in_flight workers. On failure, finished summaries stay in the
/// store and the first error is rethrown once the workers have drained.
ChainReport run_chain(const graph::GraphView& view, const ChainOptions& options,
                      LlmClient& client, SummaryStore& store);

/// Chains for every node of `view` under maximum reasoning count `m`, indexed
/// by dense node index. With `base_only` each chain holds just the raw text.
std::vector<SummaryChain> collect_chains(const graph::GraphView& view, std::size_t m,
                                         const SummaryStore& store, bool base_only = false);

}  // namespace cross::extract
