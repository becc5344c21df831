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

#include "cross/embed/time_encoder.hpp"

#include <cmath>

#include "cross/common/error.hpp"

namespace cross::embed {

TimeEncoder::TimeEncoder(nn::ParameterSet& params, const std::string& name, nn::Index dim)
    : omega_(&params.create(name + ".omega", 1, dim)),
      phase_(&params.create(name + ".phase", 1, dim)) {
  if (dim < 1) throw UsageError("time encoding dimension must be >= 1");
  for (nn::Index i = 0; i < dim; ++i) {
    const double frac = dim == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(dim - 1);
    omega_->value(0, i) = std::pow(10.0, -4.0 * (1.0 - frac));
  }
}

nn::Var TimeEncoder::operator()(nn::ParameterScope& scope, std::span<const double> deltas) const {
  nn::Matrix column(static_cast<nn::Index>(deltas.size()), 1);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    if (!(deltas[i] >= 0.0)) throw DataError("negative time delta breaks causality");
    column(static_cast<nn::Index>(i), 0) = deltas[i];
  }
  return nn::cos(nn::add_row(nn::matmul(nn::constant(std::move(column)), scope(*omega_)),
                             scope(*phase_)));
}

Eigen::VectorXd TimeEncoder::encode(double delta) const {
  if (!(delta >= 0.0)) throw DataError("negative time delta breaks causality");
  return (omega_->value.row(0).transpose() * delta + phase_->value.row(0).transpose())
      .array()
      .cos()
      .matrix();
}

}  // namespace cross::embed
