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

#include "cross/nn/layers.hpp"

namespace cross::train {

/// p̂_uv = sigmoid(MLP(z_u ∥ z_v)), MLP: 2d -> d -> 1.
class PredictionHead {
 public:
  PredictionHead(nn::ParameterSet& params, nn::Index dim, std::uint64_t seed);

  /// Row i scores the pair (z_src row i, z_dst row i). Throws NumericalError on
  /// non-finite input.
  nn::Var operator()(nn::ParameterScope& scope, const nn::Var& z_src,
                     const nn::Var& z_dst) const;

  [[nodiscard]] const nn::Mlp2& mlp() const noexcept { return mlp_; }

 private:
  nn::Mlp2 mlp_;
};

/// Summed binary cross-entropy of positives against label 1 and negatives
/// against label 0, probabilities clamped at 1e-7.
nn::Var link_loss(const nn::Var& positive, const nn::Var& negative);

}  // namespace cross::train
