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
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace cross::extract {

/// One cached LLM summary d̂_u(t̂).
struct SummaryRecord {
  std::string node;
  double time = 0.0;
  std::string summary;
  std::size_t tokens_in = 0;
  std::size_t tokens_out = 0;
};

struct ChainEntry {
  double time = 0.0;
  std::string text;
};

/// A node's summaries keyed by reasoning time, plus the base entry (0, d_u).
class SummaryChain {
 public:
  SummaryChain(std::string node, std::string base_text);

  /// Adds or replaces the summary at reasoning time `t` (> 0).
  void set(double t, std::string text);

  [[nodiscard]] const std::string& node() const noexcept { return node_; }
  /// All entries ascending by time; the first is always the base entry.
  [[nodiscard]] const std::vector<ChainEntry>& entries() const noexcept { return entries_; }

 private:
  std::string node_;
  std::vector<ChainEntry> entries_;
};

/// Entries with time < t, ascending. The base entry is always included, so
/// the result is never empty.
std::vector<ChainEntry> summaries_before(const SummaryChain& chain, double t);

/// Summary cache keyed by (node id, reasoning time). Optionally backed by an
/// append-only JSON-lines file; every put() is flushed before returning, so an
/// interrupted extraction resumes where it stopped. Thread-safe.
class SummaryStore {
 public:
  SummaryStore() = default;
  /// Loads `path` if it exists and appends subsequent records to it.
  explicit SummaryStore(const std::filesystem::path& path, std::string config_hash = {});

  SummaryStore(const SummaryStore&) = delete;
  SummaryStore& operator=(const SummaryStore&) = delete;

  [[nodiscard]] bool contains(const std::string& node, double time) const;
  [[nodiscard]] std::optional<SummaryRecord> find(const std::string& node, double time) const;
  void put(SummaryRecord record);

  [[nodiscard]] std::size_t size() const;
  /// Snapshot ordered by (node, time).
  [[nodiscard]] std::vector<SummaryRecord> records() const;

  /// Chain for `node` with the base text and the summaries at `times`.
  /// Throws DataError when a scheduled summary is missing.
  [[nodiscard]] SummaryChain chain(const std::string& node, const std::string& base_text,
                                   std::span<const double> times) const;

 private:
  using Key = std::pair<std::string, double>;

  mutable std::mutex mutex_;
  std::map<Key, SummaryRecord> records_;
  std::ofstream file_;
  std::string config_hash_;
};

}  // namespace cross::extract
