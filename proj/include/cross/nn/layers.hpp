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

#include <random>
#include <string>

#include "cross/nn/autodiff.hpp"
#include "cross/nn/parameters.hpp"

namespace cross::nn {

/// Row-vector affine map: Y = X W + b, with W of shape (in, out).
class Linear {
 public:
  Linear(ParameterSet& params, const std::string& name, Index in, Index out, bool bias,
         std::mt19937_64& rng);

  Var operator()(ParameterScope& scope, const Var& x) const;

  [[nodiscard]] Parameter& weight() const noexcept { return *weight_; }
  [[nodiscard]] Parameter* bias() const noexcept { return bias_; }
  [[nodiscard]] Index in_features() const noexcept { return weight_->value.rows(); }
  [[nodiscard]] Index out_features() const noexcept { return weight_->value.cols(); }

 private:
  Parameter* weight_;
  Parameter* bias_ = nullptr;
};

/// Two-layer perceptron: second(relu(first(x))).
class Mlp2 {
 public:
  Mlp2(ParameterSet& params, const std::string& name, Index in, Index hidden, Index out,
       std::mt19937_64& rng);

  Var operator()(ParameterScope& scope, const Var& x) const;

  [[nodiscard]] const Linear& first() const noexcept { return first_; }
  [[nodiscard]] const Linear& second() const noexcept { return second_; }

 private:
  Linear first_;
  Linear second_;
};

/// Per-row normalization with learnable gain and shift.
class LayerNorm {
 public:
  LayerNorm(ParameterSet& params, const std::string& name, Index dim);

  Var operator()(ParameterScope& scope, const Var& x) const;

 private:
  Parameter* gain_;
  Parameter* shift_;
};

}  // namespace cross::nn
