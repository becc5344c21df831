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

#include "cross/extract/summary_store.hpp"

#include <algorithm>
#include <nlohmann/json.hpp>

#include "cross/common/error.hpp"
#include "cross/common/text.hpp"

namespace cross::extract {

SummaryChain::SummaryChain(std::string node, std::string base_text) : node_(std::move(node)) {
  entries_.push_back({0.0, std::move(base_text)});
}

void SummaryChain::set(double t, std::string text) {
  if (!(t > 0.0)) throw DataError("summary time must be positive; time 0 holds the raw text");
  auto it = std::lower_bound(entries_.begin(), entries_.end(), t,
                             [](const ChainEntry& e, double v) { return e.time < v; });
  if (it != entries_.end() && it->time == t) {
    it->text = std::move(text);
  } else {
    entries_.insert(it, ChainEntry{t, std::move(text)});
  }
}

std::vector<ChainEntry> summaries_before(const SummaryChain& chain, double t) {
  const auto& entries = chain.entries();
  std::vector<ChainEntry> out{entries.front()};
  for (std::size_t i = 1; i < entries.size() && entries[i].time < t; ++i) {
    out.push_back(entries[i]);
  }
  return out;
}

SummaryStore::SummaryStore(const std::filesystem::path& path, std::string config_hash)
    : config_hash_(std::move(config_hash)) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.empty()) continue;
      try {
        const auto j = nlohmann::json::parse(line);
        SummaryRecord r{j.at("node_id").get<std::string>(), j.at("reasoning_time").get<double>(),
                        j.at("summary").get<std::string>(), j.at("tokens_in").get<std::size_t>(),
                        j.at("tokens_out").get<std::size_t>()};
        Key key{r.node, r.time};
        records_.insert_or_assign(std::move(key), std::move(r));
      } catch (const nlohmann::json::exception&) {
        // A torn final line from an interrupted run is dropped; anything else is corrupt.
        if (in.peek() == std::char_traits<char>::eof()) break;
        throw ParseError(line_no, "malformed summary record in '" + path.string() + "'");
      }
    }
  } else if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  file_.open(path, std::ios::app);
  if (!file_) throw DataError("cannot open summary cache '" + path.string() + "' for append");
}

bool SummaryStore::contains(const std::string& node, double time) const {
  std::lock_guard lock(mutex_);
  return records_.count(Key{node, time}) > 0;
}

std::optional<SummaryRecord> SummaryStore::find(const std::string& node, double time) const {
  std::lock_guard lock(mutex_);
  auto it = records_.find(Key{node, time});
  if (it == records_.end()) return std::nullopt;
  return it->second;
}

void SummaryStore::put(SummaryRecord record) {
  std::lock_guard lock(mutex_);
  if (file_.is_open()) {
    nlohmann::json j = {
        {"node_id", record.node},       {"reasoning_time", record.time},
        {"summary", record.summary},    {"tokens_in", record.tokens_in},
        {"tokens_out", record.tokens_out},
    };
    if (!config_hash_.empty()) j["config_hash"] = config_hash_;
    file_ << j.dump() << '\n';
    file_.flush();
  }
  Key key{record.node, record.time};
  records_.insert_or_assign(std::move(key), std::move(record));
}

std::size_t SummaryStore::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::vector<SummaryRecord> SummaryStore::records() const {
  std::lock_guard lock(mutex_);
  std::vector<SummaryRecord> out;
  out.reserve(records_.size());
  for (const auto& [key, r] : records_) out.push_back(r);
  return out;
}

SummaryChain SummaryStore::chain(const std::string& node, const std::string& base_text,
                                 std::span<const double> times) const {
  SummaryChain chain(node, base_text);
  std::lock_guard lock(mutex_);
  for (double t : times) {
    if (t <= 0.0) continue;  // the base entry stands in for time 0
    auto it = records_.find(Key{node, t});
    if (it == records_.end()) {
      throw DataError("no summary for node '" + node + "' at time " + format_time(t) +
                      "; run `cross extract` first");
    }
    chain.set(t, it->second.summary);
  }
  return chain;
}

}  // namespace cross::extract
