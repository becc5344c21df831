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
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "cross/app/config.hpp"
#include "cross/nn/adam.hpp"
#include "cross/train/trainer.hpp"

namespace cross::app {

/// Layout: "CROSSCK1", a little-endian uint64 header length, a JSON header,
/// then raw doubles (parameters, then Adam first and second moments when
/// present) in header order.
inline constexpr char kCheckpointMagic[] = "CROSSCK1";
inline constexpr int kCheckpointVersion = 1;

struct CheckpointInfo {
  ExperimentConfig config;
  std::string config_hash;
  std::string data_hash;  // content hash of the full view trained on
  std::uint64_t seed = 0;
  std::optional<double> best_val_mrr;
  std::size_t best_epoch = 0;
  std::uint64_t optimizer_steps = 0;
};

struct Checkpoint {
  CheckpointInfo info;
  std::unique_ptr<train::Model> model;
  bool has_optimizer = false;
  std::vector<nn::Matrix> first_moments;
  std::vector<nn::Matrix> second_moments;
};

void save_checkpoint(const std::filesystem::path& path, const CheckpointInfo& info,
                     const train::Model& model, const nn::Adam* optimizer = nullptr);

/// Rebuilds the model from the stored config and seed, then loads values.
/// Throws DataError on a bad magic, version, truncated payload, or a
/// parameter list that does not match the rebuilt model.
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Header only.
CheckpointInfo read_checkpoint_info(const std::filesystem::path& path);

}  // namespace cross::app
