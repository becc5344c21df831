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

#include <span>
#include <string>

#include "cross/nn/autodiff.hpp"
#include "cross/nn/parameters.hpp"

namespace cross::embed {

/// Phi(dt)_i = cos(omega_i * dt + phi_i) with learnable omega and phi.
/// omega starts geometrically spaced over [1e-4, 1], phi at zero.
class TimeEncoder {
 public:
  TimeEncoder(nn::ParameterSet& params, const std::string& name, nn::Index dim);

  /// One row per entry of `deltas`. Throws DataError on a negative delta.
  nn::Var operator()(nn::ParameterScope& scope, std::span<const double> deltas) const;
  [[nodiscard]] Eigen::VectorXd encode(double delta) const;

  [[nodiscard]] nn::Index dim() const noexcept { return omega_->value.cols(); }
  [[nodiscard]] nn::Parameter& omega() const noexcept { return *omega_; }
  [[nodiscard]] nn::Parameter& phase() const noexcept { return *phase_; }

 private:
  nn::Parameter* omega_;
  nn::Parameter* phase_;
};

}  // namespace cross::embed
