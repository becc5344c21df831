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

#include "cross/embed/text_embedder.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "cross/common/error.hpp"
#include "cross/common/hash.hpp"
#include "cross/common/text.hpp"

namespace cross::embed {

Vector reserved_empty(Eigen::Index dim) {
  Vector v = Vector::Zero(dim);
  v(0) = 1.0;
  return v;
}

HashEmbedder::HashEmbedder(Eigen::Index dim, std::uint64_t seed) : dim_(dim), seed_(seed) {
  if (dim < 1) throw UsageError("embedding dimension must be >= 1");
}

Vector HashEmbedder::embed(std::string_view text) const {
  Vector v = Vector::Zero(dim_);
  const double unit = 1.0 / std::sqrt(static_cast<double>(dim_));
  for (const auto& token : word_tokens(text)) {
    std::uint64_t state = derive_seed(seed_, fnv1a64(token));
    std::uint64_t bits = 0;
    for (Eigen::Index i = 0; i < dim_; ++i) {
      if (i % 64 == 0) bits = state = mix64(state);
      v(i) += (bits & 1U) ? unit : -unit;
      bits >>= 1U;
    }
  }
  const double norm = v.norm();
  if (norm == 0.0) return reserved_empty(dim_);
  return v / norm;
}

PrecomputedEmbedder::PrecomputedEmbedder(Eigen::Index dim,
                                         std::unordered_map<std::string, Vector> table)
    : dim_(dim), table_(std::move(table)) {
  for (const auto& [hash, v] : table_) {
    if (v.size() != dim_) throw DataError("embedding for " + hash + " has the wrong dimension");
  }
}

PrecomputedEmbedder PrecomputedEmbedder::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw DataError("cannot open embedding file '" + path.string() + "'; run `cross embed` first");
  }
  std::unordered_map<std::string, Vector> table;
  Eigen::Index dim = -1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::istringstream fields(line);
    std::string hash;
    fields >> hash;
    std::vector<double> values;
    std::string tok;
    while (fields >> tok) {
      double x = 0.0;
      const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), x);
      if (ec != std::errc{} || ptr != tok.data() + tok.size() || !std::isfinite(x)) {
        throw ParseError(line_no, "bad embedding value '" + tok + "'");
      }
      values.push_back(x);
    }
    if (values.empty()) throw ParseError(line_no, "embedding record without values");
    if (dim < 0) dim = static_cast<Eigen::Index>(values.size());
    if (static_cast<Eigen::Index>(values.size()) != dim) {
      throw ParseError(line_no, "expected " + std::to_string(dim) + " values");
    }
    table[hash] = Eigen::Map<Vector>(values.data(), dim);
  }
  if (dim < 0) throw DataError("embedding file '" + path.string() + "' is empty");
  return PrecomputedEmbedder(dim, std::move(table));
}

Vector PrecomputedEmbedder::embed(std::string_view text) const {
  auto it = table_.find(text_hash(text));
  if (it != table_.end()) return it->second;
  if (word_tokens(text).empty()) return reserved_empty(dim_);
  throw DataError("no precomputed embedding for text hash " + text_hash(text));
}

CachingEmbedder::CachingEmbedder(std::shared_ptr<const TextEmbedder> inner)
    : inner_(std::move(inner)) {}

Vector CachingEmbedder::embed(std::string_view text) const {
  const auto key = text_hash(text);
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
  }
  Vector v = inner_->embed(text);
  std::lock_guard lock(mutex_);
  auto [it, inserted] = cache_.emplace(key, std::move(v));
  if (inserted) ++misses_;
  return it->second;
}

void CachingEmbedder::preload(const PrecomputedEmbedder& saved) {
  if (saved.dim() != dim()) {
    throw DataError("embedding cache has dimension " + std::to_string(saved.dim()) +
                    " but the embedder has " + std::to_string(dim()));
  }
  std::lock_guard lock(mutex_);
  for (const auto& [key, v] : saved.table()) cache_.emplace(key, v);
}

std::size_t CachingEmbedder::cache_size() const {
  std::lock_guard lock(mutex_);
  return cache_.size();
}

std::size_t CachingEmbedder::misses() const {
  std::lock_guard lock(mutex_);
  return misses_;
}

void CachingEmbedder::save(const std::filesystem::path& path) const {
  std::lock_guard lock(mutex_);
  write_embedding_file(path, cache_);
}

void write_embedding_file(const std::filesystem::path& path,
                          const std::unordered_map<std::string, Vector>& table) {
  std::vector<const std::pair<const std::string, Vector>*> rows;
  rows.reserve(table.size());
  for (const auto& kv : table) rows.push_back(&kv);
  std::sort(rows.begin(), rows.end(), [](auto* a, auto* b) { return a->first < b->first; });

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write embedding file '" + path.string() + "'");
  char buf[32];
  for (const auto* row : rows) {
    out << row->first;
    for (Eigen::Index i = 0; i < row->second.size(); ++i) {
      const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, row->second(i));
      out << ' ' << std::string_view(buf, static_cast<std::size_t>(end - buf));
    }
    out << '\n';
  }
}

}  // namespace cross::embed
