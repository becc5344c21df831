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

#include "cross/extract/llm_client.hpp"

#include <algorithm>
#include <cmath>
#include <spdlog/spdlog.h>
#include <thread>

#include "cross/common/error.hpp"

namespace cross::extract {

std::chrono::milliseconds RetryPolicy::delay_before(int attempt) const {
  if (attempt <= 1) return std::chrono::milliseconds{0};
  const double scaled = static_cast<double>(initial_backoff.count()) *
                        std::pow(multiplier, static_cast<double>(attempt - 2));
  const double capped = std::min(scaled, static_cast<double>(max_backoff.count()));
  return std::chrono::milliseconds{static_cast<long long>(capped)};
}

void CostLedger::add_wall_time(double seconds) {
  std::lock_guard lock(time_mutex_);
  wall_time_s_ += std::max(0.0, seconds);
}

CostLedger::Snapshot CostLedger::snapshot() const {
  Snapshot s;
  s.input_tokens = input_tokens_.load();
  s.output_tokens = output_tokens_.load();
  s.calls = calls_.load();
  std::lock_guard lock(time_mutex_);
  s.wall_time_s = wall_time_s_;
  return s;
}

/// RAII hold on one of the client's in-flight request slots.
class LlmClient::Slot {
 public:
  explicit Slot(LlmClient& client) : client_(client) {
    std::unique_lock lock(client_.slot_mutex_);
    client_.slot_cv_.wait(lock, [this] {
      return client_.in_flight_ < client_.options_.max_in_flight;
    });
    ++client_.in_flight_;
  }
  ~Slot() {
    {
      std::lock_guard lock(client_.slot_mutex_);
      --client_.in_flight_;
    }
    client_.slot_cv_.notify_one();
  }
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

 private:
  LlmClient& client_;
};

LlmClient::LlmClient(std::shared_ptr<LlmTransport> transport, LlmClientOptions options)
    : transport_(std::move(transport)), options_(std::move(options)) {
  if (!transport_) throw UsageError("LLM client needs a transport");
  if (options_.max_in_flight == 0) throw UsageError("max in-flight requests must be >= 1");
  if (options_.retry.max_attempts < 1) throw UsageError("retry policy needs >= 1 attempt");
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

SummaryResult LlmClient::summarize(const std::string& prompt) {
  if (prompt.empty()) throw DataError("cannot summarize an empty prompt");
  SummaryResult result;
  for (int attempt = 1;; ++attempt) {
    if (attempt > 1) options_.sleep(options_.retry.delay_before(attempt));
    result.attempts = attempt;
    try {
      LlmReply reply;
      {
        Slot slot(*this);
        ledger_.add_call();
        reply = transport_->send(prompt);
      }
      ledger_.add_tokens(reply.tokens_in, reply.tokens_out);
      result.tokens_in = reply.tokens_in;
      result.tokens_out = reply.tokens_out;
      result.summary = std::move(reply.text);
      if (result.summary.size() > options_.max_response_bytes) {
        spdlog::warn("LLM response of {} bytes truncated to {}", result.summary.size(),
                     options_.max_response_bytes);
        std::size_t cut = options_.max_response_bytes;
        // Never split a UTF-8 sequence.
        while (cut > 0 && (static_cast<unsigned char>(result.summary[cut]) & 0xC0) == 0x80) --cut;
        result.summary.resize(cut);
        result.truncated = true;
      }
      return result;
    } catch (const TransportError& e) {
      if (!e.retryable() || attempt >= options_.retry.max_attempts) throw;
      spdlog::debug("LLM attempt {} failed (status {}): {}", attempt, e.status(), e.what());
    }
  }
}

}  // namespace cross::extract
