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

#include "cross/extract/chain_runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <mutex>
#include <numeric>
#include <random>
#include <thread>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/extract/schedule.hpp"

namespace cross::extract {
namespace {

std::vector<double> positive_times(const graph::GraphView& view, graph::NodeIndex u,
                                   std::size_t m) {
  auto schedule = reasoning_timestamps(view.timestamps(u), m);
  std::erase_if(schedule.times, [](double t) { return t <= 0.0; });
  return schedule.times;
}

}  // namespace

ChainReport run_chain(const graph::GraphView& view, const ChainOptions& options,
                      LlmClient& client, SummaryStore& store) {
  if (options.max_in_flight == 0) throw UsageError("max in-flight must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  ChainReport report;
  std::mutex report_mutex;

  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;

  auto process = [&](graph::NodeIndex u) {
    const auto& id = view.nodes().id(u);
    const auto times = positive_times(view, u, options.m);
    std::vector<std::size_t> source(times.size());
    std::iota(source.begin(), source.end(), std::size_t{0});
    if (options.order == ChainOrder::kScrambled) {
      std::mt19937_64 rng(derive_seed(options.scramble_seed, fnv1a64(id)));
      std::shuffle(source.begin(), source.end(), rng);
    }
    const auto record = view.node_record(u);
    std::size_t generated = 0;
    std::size_t cached = 0;
    for (std::size_t i = 0; i < times.size() && !failed.load(); ++i) {
      // Generated at times[source[i]], filed under times[i].
      if (store.contains(id, times[i])) {
        ++cached;
        continue;
      }
      const double generated_at = times[source[i]];
      const auto history = textual_history(u, generated_at, view);
      const auto prompt = build_prompt(record, generated_at, history, options.prompt);
      auto result = client.summarize(prompt);
      store.put({id, times[i], std::move(result.summary), result.tokens_in, result.tokens_out});
      ++generated;
    }
    std::lock_guard lock(report_mutex);
    report.scheduled += times.size();
    report.generated += generated;
    report.cached += cached;
  };

  auto worker = [&] {
    while (!failed.load()) {
      const std::size_t u = next.fetch_add(1);
      if (u >= view.num_nodes()) return;
      try {
        process(static_cast<graph::NodeIndex>(u));
      } catch (...) {
        std::lock_guard lock(report_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(
      1, std::min(options.max_in_flight, view.num_nodes()));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t i = 0; i < workers; ++i) pool.emplace_back(worker);
  }

  report.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  client.ledger().add_wall_time(report.elapsed_s);
  if (first_error) std::rethrow_exception(first_error);
  return report;
}

std::vector<SummaryChain> collect_chains(const graph::GraphView& view, std::size_t m,
                                         const SummaryStore& store, bool base_only) {
  std::vector<SummaryChain> chains;
  chains.reserve(view.num_nodes());
  for (graph::NodeIndex u = 0; u < view.num_nodes(); ++u) {
    const auto& id = view.nodes().id(u);
    if (base_only) {
      chains.emplace_back(id, view.nodes().text(u));
    } else {
      chains.push_back(store.chain(id, view.nodes().text(u), positive_times(view, u, m)));
    }
  }
  return chains;
}

}  // namespace cross::extract
