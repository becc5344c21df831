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

#include <cstddef>
#include <memory>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "cross/nn/autodiff.hpp"

namespace cross::nn {

/// A named trainable tensor. `id` is its position in the owning ParameterSet.
struct Parameter {
  std::string name;
  Matrix value;
  std::size_t id = 0;
};

/// Owns parameters in creation order. Addresses are stable.
class ParameterSet {
 public:
  /// Registers a zero-filled parameter. Names must be unique.
  Parameter& create(const std::string& name, Index rows, Index cols);

  [[nodiscard]] std::size_t size() const noexcept { return params_.size(); }
  [[nodiscard]] Parameter& operator[](std::size_t i) { return *params_[i]; }
  [[nodiscard]] const Parameter& operator[](std::size_t i) const { return *params_[i]; }
  [[nodiscard]] const Parameter* find(const std::string& name) const;
  /// Total number of scalars.
  [[nodiscard]] std::size_t numel() const;

  /// Deep copy of all values, in order.
  [[nodiscard]] std::vector<Matrix> snapshot() const;
  void restore(const std::vector<Matrix>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
  std::unordered_map<std::string, std::size_t> by_name_;
};

/// Per-parameter gradient accumulators parallel to a ParameterSet.
class GradientBuffer {
 public:
  explicit GradientBuffer(const ParameterSet& params);

  void add(std::size_t id, const Matrix& grad) { grads_[id] += grad; }
  void zero();
  GradientBuffer& operator+=(const GradientBuffer& other);

  [[nodiscard]] std::size_t size() const noexcept { return grads_.size(); }
  [[nodiscard]] const Matrix& operator[](std::size_t id) const { return grads_[id]; }
  [[nodiscard]] bool all_finite() const;

 private:
  std::vector<Matrix> grads_;
};

/// Binds parameters into one computation graph. Each parameter gets a single
/// leaf per scope, so its gradient from every use is summed on that leaf.
class ParameterScope {
 public:
  ParameterScope() : track_(grad_enabled()) {}

  Var operator()(const Parameter& p);
  /// Adds every bound leaf's gradient into `out`. Call after backward().
  void collect(GradientBuffer& out) const;

 private:
  bool track_;
  std::unordered_map<const Parameter*, Var> leaves_;
};

void xavier_uniform(Parameter& p, std::mt19937_64& rng);

}  // namespace cross::nn
