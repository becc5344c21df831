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

#include "cross/app/config.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"

namespace cross::app {
namespace {

using nlohmann::json;

json llm_json(const LlmSettings& s) {
  return {{"base_url", s.base_url},         {"api_key_env", s.api_key_env},
          {"model", s.model},               {"max_in_flight", s.max_in_flight},
          {"max_attempts", s.max_attempts}, {"initial_backoff_s", s.initial_backoff_s},
          {"timeout_s", s.timeout_s}};
}

json config_json(const ExperimentConfig& c) {
  return {{"d", c.d},
          {"layers", c.layers},
          {"m", c.m},
          {"k", c.k},
          {"batch_size", c.batch_size},
          {"lr", c.lr},
          {"beta1", c.beta1},
          {"beta2", c.beta2},
          {"adam_eps", c.adam_eps},
          {"epochs", c.epochs},
          {"patience", c.patience},
          {"eval_interval", c.eval_interval},
          {"num_negatives", c.num_negatives},
          {"seeds", c.seeds},
          {"embedder", c.embedder},
          {"embedding_file", c.embedding_file},
          {"backbone", c.backbone},
          {"variant", c.variant},
          {"heads", c.heads},
          {"ffn_multiplier", c.ffn_multiplier},
          {"aggregation", c.aggregation},
          {"time_augment", c.time_augment},
          {"max_history", c.max_history},
          {"train_ratio", c.train_ratio},
          {"val_ratio", c.val_ratio},
          {"test_ratio", c.test_ratio},
          {"deterministic", c.deterministic},
          {"threads", c.threads},
          {"llm", llm_json(c.llm)}};
}

template <class T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end()) {
    try {
      out = it->get<T>();
    } catch (const json::exception& e) {
      throw UsageError(std::string("config key '") + key + "': " + e.what());
    }
  }
}

}  // namespace

void ExperimentConfig::validate() const {
  auto positive = [](std::size_t v, const char* name) {
    if (v < 1) throw UsageError(std::string(name) + " must be >= 1");
  };
  positive(d, "d");
  positive(layers, "layers");
  positive(m, "m");
  positive(k, "k");
  positive(batch_size, "batch_size");
  positive(epochs, "epochs");
  positive(patience, "patience");
  positive(eval_interval, "eval_interval");
  positive(num_negatives, "num_negatives");
  positive(heads, "heads");
  positive(ffn_multiplier, "ffn_multiplier");
  positive(max_history, "max_history");
  positive(threads, "threads");
  positive(llm.max_in_flight, "llm.max_in_flight");
  positive(llm.max_attempts, "llm.max_attempts");
  if (seeds.empty()) throw UsageError("at least one seed is required");
  if (!(lr > 0.0)) throw UsageError("lr must be positive");
  for (double r : {train_ratio, val_ratio, test_ratio, beta1, beta2}) {
    if (r < 0.0 || r > 1.0) throw UsageError("ratios and betas must lie in [0, 1]");
  }
  if (embedder != "hash" && embedder != "precomputed") {
    throw UsageError("embedder must be 'hash' or 'precomputed'");
  }
  if (embedder == "precomputed" && embedding_file.empty()) {
    throw UsageError("the precomputed embedder needs embedding_file");
  }
  if (backbone != "temporal_attention") throw UsageError("backbone must be 'temporal_attention'");
  if (aggregation != "sum" && aggregation != "mean") {
    throw UsageError("aggregation must be 'sum' or 'mean'");
  }
  if ((2 * d) % heads != 0) throw UsageError("2d must be divisible by heads");
  (void)model::variant_from_string(variant);
}

std::string ExperimentConfig::to_json() const { return config_json(*this).dump(2); }

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw UsageError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw UsageError("config must be a JSON object");
  ExperimentConfig c;
  const json defaults = config_json(c);
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw UsageError("unknown config key '" + key + "'");
  }
  read(j, "d", c.d);
  read(j, "layers", c.layers);
  read(j, "m", c.m);
  read(j, "k", c.k);
  read(j, "batch_size", c.batch_size);
  read(j, "lr", c.lr);
  read(j, "beta1", c.beta1);
  read(j, "beta2", c.beta2);
  read(j, "adam_eps", c.adam_eps);
  read(j, "epochs", c.epochs);
  read(j, "patience", c.patience);
  read(j, "eval_interval", c.eval_interval);
  read(j, "num_negatives", c.num_negatives);
  read(j, "seeds", c.seeds);
  read(j, "embedder", c.embedder);
  read(j, "embedding_file", c.embedding_file);
  read(j, "backbone", c.backbone);
  read(j, "variant", c.variant);
  read(j, "heads", c.heads);
  read(j, "ffn_multiplier", c.ffn_multiplier);
  read(j, "aggregation", c.aggregation);
  read(j, "time_augment", c.time_augment);
  read(j, "max_history", c.max_history);
  read(j, "train_ratio", c.train_ratio);
  read(j, "val_ratio", c.val_ratio);
  read(j, "test_ratio", c.test_ratio);
  read(j, "deterministic", c.deterministic);
  read(j, "threads", c.threads);
  if (auto it = j.find("llm"); it != j.end()) {
    const json known = llm_json(c.llm);
    for (const auto& [key, value] : it->items()) {
      if (!known.contains(key)) throw UsageError("unknown config key 'llm." + key + "'");
    }
    read(*it, "base_url", c.llm.base_url);
    read(*it, "api_key_env", c.llm.api_key_env);
    read(*it, "model", c.llm.model);
    read(*it, "max_in_flight", c.llm.max_in_flight);
    read(*it, "max_attempts", c.llm.max_attempts);
    read(*it, "initial_backoff_s", c.llm.initial_backoff_s);
    read(*it, "timeout_s", c.llm.timeout_s);
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return from_json(buffer.str());
}

void ExperimentConfig::save(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write config '" + path.string() + "'");
  out << to_json() << '\n';
}

std::string ExperimentConfig::hash() const {
  json j = config_json(*this);
  for (const char* key : {"seeds", "deterministic", "threads", "llm"}) j.erase(key);
  return to_hex(fnv1a64(j.dump()));
}

model::EncoderConfig ExperimentConfig::encoder_config(std::uint64_t seed) const {
  model::EncoderConfig e;
  e.dim = static_cast<nn::Index>(d);
  e.layers = layers;
  e.neighbors = k;
  e.heads = static_cast<nn::Index>(heads);
  e.ffn_multiplier = static_cast<nn::Index>(ffn_multiplier);
  e.aggregation = aggregation == "mean" ? model::Aggregation::kMean : model::Aggregation::kSum;
  e.time_augment = time_augment;
  e.variant = model::variant_from_string(variant);
  e.max_items = m + 1;
  e.seed = derive_seed(seed, "init");
  return e;
}

}  // namespace cross::app
