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

#include "cross/nn/parameters.hpp"

#include <cmath>

#include "cross/common/error.hpp"

namespace cross::nn {

Parameter& ParameterSet::create(const std::string& name, Index rows, Index cols) {
  if (by_name_.count(name) != 0) throw UsageError("duplicate parameter name '" + name + "'");
  auto p = std::make_unique<Parameter>();
  p->name = name;
  p->value = Matrix::Zero(rows, cols);
  p->id = params_.size();
  by_name_.emplace(name, p->id);
  params_.push_back(std::move(p));
  return *params_.back();
}

const Parameter* ParameterSet::find(const std::string& name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? nullptr : params_[it->second].get();
}

std::size_t ParameterSet::numel() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p->value.size());
  return n;
}

std::vector<Matrix> ParameterSet::snapshot() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p->value);
  return out;
}

void ParameterSet::restore(const std::vector<Matrix>& values) {
  if (values.size() != params_.size()) throw DataError("parameter count mismatch on restore");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].rows() != params_[i]->value.rows() ||
        values[i].cols() != params_[i]->value.cols()) {
      throw DataError("shape mismatch restoring parameter '" + params_[i]->name + "'");
    }
    params_[i]->value = values[i];
  }
}

GradientBuffer::GradientBuffer(const ParameterSet& params) {
  grads_.reserve(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    grads_.push_back(Matrix::Zero(params[i].value.rows(), params[i].value.cols()));
  }
}

void GradientBuffer::zero() {
  for (auto& g : grads_) g.setZero();
}

GradientBuffer& GradientBuffer::operator+=(const GradientBuffer& other) {
  for (std::size_t i = 0; i < grads_.size(); ++i) grads_[i] += other.grads_[i];
  return *this;
}

bool GradientBuffer::all_finite() const {
  for (const auto& g : grads_) {
    if (!g.allFinite()) return false;
  }
  return true;
}

Var ParameterScope::operator()(const Parameter& p) {
  auto it = leaves_.find(&p);
  if (it != leaves_.end()) return it->second;
  Var v = borrowed(p.value, track_);
  leaves_.emplace(&p, v);
  return v;
}

void ParameterScope::collect(GradientBuffer& out) const {
  for (const auto& [param, leaf] : leaves_) {
    if (leaf.grad().size() != 0) out.add(param->id, leaf.grad());
  }
}

void xavier_uniform(Parameter& p, std::mt19937_64& rng) {
  const double limit =
      std::sqrt(6.0 / static_cast<double>(p.value.rows() + p.value.cols()));
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Index i = 0; i < p.value.size(); ++i) p.value(i) = dist(rng);
}

}  // namespace cross::nn
