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

#include <atomic>
#include <chrono>
#include <cstddef>
#include <deque>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "cross/extract/llm_client.hpp"

namespace cross::extract {

/// Offline stand-in for a hosted LLM. It answers with a deterministic
/// extractive digest of the prompt: the terms that recur across the rendered
/// interactions, most frequent first, or the description's terms when there
/// is no history. It also records peak concurrency for tests.
class MockLlm final : public LlmTransport {
 public:
  struct Options {
    std::chrono::microseconds latency{0};
    /// HTTP statuses to fail with, consumed one per request before any success.
    std::vector<int> scripted_failures;
    std::size_t max_terms = 6;
  };

  MockLlm() : MockLlm(Options{}) {}
  explicit MockLlm(Options options);

  LlmReply send(const std::string& prompt) override;

  [[nodiscard]] std::size_t requests() const noexcept { return requests_.load(); }
  [[nodiscard]] std::size_t peak_in_flight() const noexcept { return peak_.load(); }

  static std::string digest(std::string_view prompt, std::size_t max_terms);

 private:
  Options options_;
  std::mutex failure_mutex_;
  std::deque<int> failures_;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> peak_{0};
};

}  // namespace cross::extract
