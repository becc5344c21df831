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

#include "cross/train/head.hpp"

#include <array>

#include "cross/common/error.hpp"
#include "cross/model/layers.hpp"

namespace cross::train {

PredictionHead::PredictionHead(nn::ParameterSet& params, nn::Index dim, std::uint64_t seed)
    : mlp_([&] {
        auto rng = model::component_rng(seed, "head");
        return nn::Mlp2(params, "head", 2 * dim, dim, 1, rng);
      }()) {}

nn::Var PredictionHead::operator()(nn::ParameterScope& scope, const nn::Var& z_src,
                                   const nn::Var& z_dst) const {
  if (!z_src.value().allFinite() || !z_dst.value().allFinite()) {
    throw NumericalError("prediction head received non-finite representations");
  }
  const std::array<nn::Var, 2> parts{z_src, z_dst};
  return nn::sigmoid(mlp_(scope, nn::concat_cols(parts)));
}

nn::Var link_loss(const nn::Var& positive, const nn::Var& negative) {
  nn::Matrix targets(positive.rows() + negative.rows(), 1);
  targets.topRows(positive.rows()).setOnes();
  targets.bottomRows(negative.rows()).setZero();
  const std::array<nn::Var, 2> parts{positive, negative};
  return nn::binary_cross_entropy(nn::concat_rows(parts), targets, 1e-7);
}

}  // namespace cross::train
