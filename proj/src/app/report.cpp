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

#include "cross/app/report.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "cross/common/error.hpp"

namespace cross::app {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::filesystem::path& path, bool append) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

std::vector<MetricRecord> records_of(const train::MetricsReport& report,
                                     const std::string& config_hash, const std::string& label) {
  std::vector<MetricRecord> out;
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    out.push_back({report.task, report.setting, i < report.seeds.size() ? report.seeds[i] : 0,
                   report.metric, report.values[i], config_hash, label});
  }
  return out;
}

std::string to_json_line(const MetricRecord& r) {
  json j = {{"task", r.task},   {"setting", r.setting}, {"seed", r.seed},
            {"metric", r.metric}, {"value", r.value},   {"config_hash", r.config_hash}};
  if (!r.label.empty()) j["label"] = r.label;
  return j.dump();
}

void write_metrics(const std::filesystem::path& path, std::span<const MetricRecord> records,
                   bool append) {
  auto out = open_out(path, append);
  for (const auto& r : records) out << to_json_line(r) << '\n';
}

std::vector<MetricRecord> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open metrics report '" + path.string() + "'");
  std::vector<MetricRecord> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      MetricRecord r;
      r.task = j.at("task").get<std::string>();
      r.setting = j.at("setting").get<std::string>();
      r.seed = j.at("seed").get<std::uint64_t>();
      r.metric = j.at("metric").get<std::string>();
      r.value = j.at("value").get<double>();
      r.config_hash = j.at("config_hash").get<std::string>();
      r.label = j.value("label", std::string{});
      out.push_back(std::move(r));
    } catch (const json::exception& e) {
      throw ParseError(line_no, std::string("bad metrics record: ") + e.what());
    }
  }
  return out;
}

void write_train_log(const std::filesystem::path& path, std::span<const train::EpochRecord> log,
                     std::uint64_t seed, const std::string& config_hash) {
  auto out = open_out(path, false);
  for (const auto& r : log) {
    json j = {{"epoch", r.epoch},
              {"loss", r.loss},
              {"val_mrr", r.val_mrr ? json(*r.val_mrr) : json(nullptr)},
              {"seconds", r.seconds},
              {"seed", seed},
              {"config_hash", config_hash}};
    out << j.dump() << '\n';
  }
}

}  // namespace cross::app
