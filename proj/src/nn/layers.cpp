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

#include "cross/nn/layers.hpp"

namespace cross::nn {

Linear::Linear(ParameterSet& params, const std::string& name, Index in, Index out, bool bias,
               std::mt19937_64& rng)
    : weight_(&params.create(name + ".weight", in, out)) {
  xavier_uniform(*weight_, rng);
  if (bias) bias_ = &params.create(name + ".bias", 1, out);
}

Var Linear::operator()(ParameterScope& scope, const Var& x) const {
  Var y = matmul(x, scope(*weight_));
  return bias_ ? add_row(y, scope(*bias_)) : y;
}

Mlp2::Mlp2(ParameterSet& params, const std::string& name, Index in, Index hidden, Index out,
           std::mt19937_64& rng)
    : first_(params, name + ".0", in, hidden, true, rng),
      second_(params, name + ".1", hidden, out, true, rng) {}

Var Mlp2::operator()(ParameterScope& scope, const Var& x) const {
  return second_(scope, relu(first_(scope, x)));
}

LayerNorm::LayerNorm(ParameterSet& params, const std::string& name, Index dim)
    : gain_(&params.create(name + ".gain", 1, dim)),
      shift_(&params.create(name + ".shift", 1, dim)) {
  gain_->value.setOnes();
}

Var LayerNorm::operator()(ParameterScope& scope, const Var& x) const {
  return add_row(mul_row(layer_norm_rows(x), scope(*gain_)), scope(*shift_));
}

}  // namespace cross::nn
