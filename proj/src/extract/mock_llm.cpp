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

#include "cross/extract/mock_llm.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <thread>

#include "cross/common/error.hpp"
#include "cross/common/text.hpp"
#include "cross/extract/prompt.hpp"

namespace cross::extract {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.push_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

MockLlm::MockLlm(Options options)
    : options_(std::move(options)),
      failures_(options_.scripted_failures.begin(), options_.scripted_failures.end()) {}

std::string MockLlm::digest(std::string_view prompt, std::size_t max_terms) {
  std::string_view description;
  std::vector<std::string_view> history;
  bool in_history = false;
  for (auto line : split_lines(prompt)) {
    if (line.starts_with("Descriptions: ")) {
      description = line.substr(14);
    } else if (line.starts_with(kHistorySection)) {
      in_history = true;
    } else if (in_history && line.starts_with("- [")) {
      auto close = line.find("] ");
      history.push_back(close == std::string_view::npos ? line : line.substr(close + 2));
    }
  }

  // Document frequency: in how many interactions each term occurs.
  std::map<std::string, std::size_t> frequency;
  for (auto line : history) {
    auto tokens = word_tokens(line);
    std::set<std::string> unique(tokens.begin(), tokens.end());
    for (const auto& t : unique) ++frequency[t];
  }
  const std::size_t min_count = history.size() >= 2 ? 2 : 1;
  std::vector<std::pair<std::string, std::size_t>> terms;
  for (auto& [term, count] : frequency) {
    if (count >= min_count) terms.emplace_back(term, count);
  }
  std::stable_sort(terms.begin(), terms.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });

  std::string out;
  if (!terms.empty()) {
    out = "themes:";
    for (std::size_t i = 0; i < terms.size() && i < max_terms; ++i) out += " " + terms[i].first;
    return out;
  }
  out = "profile:";
  std::set<std::string> seen;
  std::size_t emitted = 0;
  for (const auto& t : word_tokens(description)) {
    if (emitted == max_terms) break;
    if (seen.insert(t).second) {
      out += " " + t;
      ++emitted;
    }
  }
  return out;
}

LlmReply MockLlm::send(const std::string& prompt) {
  requests_.fetch_add(1);
  const std::size_t now = in_flight_.fetch_add(1) + 1;
  std::size_t peak = peak_.load();
  while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
  }
  struct Leave {
    std::atomic<std::size_t>& counter;
    ~Leave() { counter.fetch_sub(1); }
  } leave{in_flight_};

  if (options_.latency.count() > 0) std::this_thread::sleep_for(options_.latency);
  {
    std::lock_guard lock(failure_mutex_);
    if (!failures_.empty()) {
      const int status = failures_.front();
      failures_.pop_front();
      throw TransportError(status, "mock failure with status " + std::to_string(status));
    }
  }
  LlmReply reply;
  reply.text = digest(prompt, options_.max_terms);
  reply.tokens_in = whitespace_token_count(prompt);
  reply.tokens_out = whitespace_token_count(reply.text);
  return reply;
}

}  // namespace cross::extract
