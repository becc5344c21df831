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
#include <span>
#include <string>
#include <vector>

#include "cross/train/metrics.hpp"
#include "cross/train/trainer.hpp"

namespace cross::app {

/// One line of a metrics report file.
struct MetricRecord {
  std::string task;
  std::string setting;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
  std::string config_hash;
  std::string label;  // optional row label such as an ablation variant or "m=4"
};

std::vector<MetricRecord> records_of(const train::MetricsReport& report,
                                     const std::string& config_hash,
                                     const std::string& label = {});

/// Line-delimited JSON; `append` keeps earlier runs in the file.
void write_metrics(const std::filesystem::path& path, std::span<const MetricRecord> records,
                   bool append = false);
std::vector<MetricRecord> read_metrics(const std::filesystem::path& path);

/// One line per epoch: epoch, loss, val_mrr (null when not evaluated), seconds.
void write_train_log(const std::filesystem::path& path, std::span<const train::EpochRecord> log,
                     std::uint64_t seed, const std::string& config_hash);

/// Serializes a record the way write_metrics does, without a newline.
std::string to_json_line(const MetricRecord& record);

}  // namespace cross::app
