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

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cross/model/co_encoder.hpp"

namespace cross::app {

struct LlmSettings {
  std::string base_url = "https://api.deepseek.com";
  std::string api_key_env = "CROSS_LLM_API_KEY";
  std::string model = "deepseek-chat";
  std::size_t max_in_flight = 8;
  std::size_t max_attempts = 3;
  double initial_backoff_s = 0.5;
  double timeout_s = 60.0;
};

/// Every knob of an experiment. Serializes to flat JSON; the hash covers the
/// fields that change results (not seeds, threading or LLM transport).
struct ExperimentConfig {
  std::size_t d = 384;
  std::size_t layers = 2;
  std::size_t m = 8;
  std::size_t k = 10;
  std::size_t batch_size = 256;
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  std::size_t epochs = 50;
  std::size_t patience = 5;
  std::size_t eval_interval = 5;
  std::size_t num_negatives = 100;
  std::vector<std::uint64_t> seeds{0, 1, 2};
  std::string embedder = "hash";  // "hash" or "precomputed"
  std::string embedding_file;     // for "precomputed"
  std::string backbone = "temporal_attention";
  std::string variant = "full";
  std::size_t heads = 2;
  std::size_t ffn_multiplier = 4;
  std::string aggregation = "sum";  // "sum" or "mean"
  bool time_augment = false;
  std::size_t max_history = 32;
  double train_ratio = 0.6;
  double val_ratio = 0.2;
  double test_ratio = 0.2;
  bool deterministic = true;
  std::size_t threads = 1;
  LlmSettings llm;

  /// Throws UsageError on out-of-range values.
  void validate() const;
  [[nodiscard]] std::string to_json() const;
  /// Missing keys keep defaults; unknown keys are a UsageError.
  static ExperimentConfig from_json(const std::string& text);
  static ExperimentConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  /// 16 hex digits.
  [[nodiscard]] std::string hash() const;

  [[nodiscard]] model::EncoderConfig encoder_config(std::uint64_t seed) const;
};

}  // namespace cross::app
