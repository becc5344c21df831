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
#include <condition_variable>
#include <cstddef>
#include <functional>
#include <memory>
#include <mutex>
#include <string>

namespace cross::extract {

struct LlmReply {
  std::string text;
  std::size_t tokens_in = 0;
  std::size_t tokens_out = 0;
};

/// One request/response exchange with a model backend. Implementations throw
/// TransportError on failure and must tolerate concurrent callers.
class LlmTransport {
 public:
  virtual ~LlmTransport() = default;
  virtual LlmReply send(const std::string& prompt) = 0;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{500};
  double multiplier = 2.0;
  std::chrono::milliseconds max_backoff{30'000};

  /// Delay before attempt number `attempt` (2-based: the first retry).
  [[nodiscard]] std::chrono::milliseconds delay_before(int attempt) const;
};

/// Token, call and time accounting for LLM usage. Counters only grow.
class CostLedger {
 public:
  struct Snapshot {
    std::size_t input_tokens = 0;
    std::size_t output_tokens = 0;
    std::size_t calls = 0;
    double wall_time_s = 0.0;

    /// Cost in dollars for per-1000-token prices.
    [[nodiscard]] double money(double price_in_per_k, double price_out_per_k) const {
      return static_cast<double>(input_tokens) / 1000.0 * price_in_per_k +
             static_cast<double>(output_tokens) / 1000.0 * price_out_per_k;
    }
  };

  void add_call() { calls_.fetch_add(1, std::memory_order_relaxed); }
  void add_tokens(std::size_t in, std::size_t out) {
    input_tokens_.fetch_add(in, std::memory_order_relaxed);
    output_tokens_.fetch_add(out, std::memory_order_relaxed);
  }
  void add_wall_time(double seconds);

  [[nodiscard]] Snapshot snapshot() const;

 private:
  std::atomic<std::size_t> input_tokens_{0};
  std::atomic<std::size_t> output_tokens_{0};
  std::atomic<std::size_t> calls_{0};
  mutable std::mutex time_mutex_;
  double wall_time_s_ = 0.0;
};

struct SummaryResult {
  std::string summary;
  std::size_t tokens_in = 0;
  std::size_t tokens_out = 0;
  int attempts = 0;
  bool truncated = false;
};

struct LlmClientOptions {
  std::size_t max_in_flight = 8;
  RetryPolicy retry;
  std::size_t max_response_bytes = 16 * 1024;
  /// Sleep hook for backoff; tests replace it to avoid real waiting.
  std::function<void(std::chrono::milliseconds)> sleep;
};

/// Bounded-concurrency, retrying front end over an LlmTransport.
class LlmClient {
 public:
  explicit LlmClient(std::shared_ptr<LlmTransport> transport, LlmClientOptions options = {});

  /// Sends `prompt`, retrying transient failures per the retry policy.
  /// Throws TransportError carrying the last status once retries are exhausted
  /// or the failure is not retryable.
  SummaryResult summarize(const std::string& prompt);

  [[nodiscard]] CostLedger& ledger() noexcept { return ledger_; }
  [[nodiscard]] const CostLedger& ledger() const noexcept { return ledger_; }
  [[nodiscard]] const LlmClientOptions& options() const noexcept { return options_; }

 private:
  class Slot;

  std::shared_ptr<LlmTransport> transport_;
  LlmClientOptions options_;
  CostLedger ledger_;
  std::mutex slot_mutex_;
  std::condition_variable slot_cv_;
  std::size_t in_flight_ = 0;
};

}  // namespace cross::extract
