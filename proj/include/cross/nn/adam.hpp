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
#include <vector>

#include "cross/nn/parameters.hpp"

namespace cross::nn {

struct AdamOptions {
  double lr = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// Adam with bias correction. Holds first/second moments parallel to the parameter set.
class Adam {
 public:
  Adam(ParameterSet& params, AdamOptions options);

  void step(const GradientBuffer& grads);

  [[nodiscard]] const AdamOptions& options() const noexcept { return options_; }
  [[nodiscard]] std::uint64_t steps() const noexcept { return steps_; }

  // Checkpoint access.
  [[nodiscard]] const std::vector<Matrix>& first_moments() const noexcept { return m_; }
  [[nodiscard]] const std::vector<Matrix>& second_moments() const noexcept { return v_; }
  void load_state(std::uint64_t steps, std::vector<Matrix> m, std::vector<Matrix> v);

 private:
  ParameterSet* params_;
  AdamOptions options_;
  std::uint64_t steps_ = 0;
  std::vector<Matrix> m_;
  std::vector<Matrix> v_;
};

}  // namespace cross::nn
