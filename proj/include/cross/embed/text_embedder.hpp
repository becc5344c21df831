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

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace cross::embed {

using Vector = Eigen::VectorXd;

/// Maps text to a d-dimensional feature vector. Implementations must be
/// deterministic and safe to call concurrently.
class TextEmbedder {
 public:
  virtual ~TextEmbedder() = default;
  [[nodiscard]] virtual Eigen::Index dim() const = 0;
  [[nodiscard]] virtual Vector embed(std::string_view text) const = 0;
  [[nodiscard]] virtual std::string name() const = 0;
};

/// Unit vector along axis 0; what every embedder returns for empty text.
Vector reserved_empty(Eigen::Index dim);

/// Deterministic bag-of-words projection: each word token maps to a seeded
/// pseudo-random sign vector, the sum is L2-normalized. Texts without word
/// tokens map to reserved_empty().
class HashEmbedder final : public TextEmbedder {
 public:
  explicit HashEmbedder(Eigen::Index dim, std::uint64_t seed = 0);

  [[nodiscard]] Eigen::Index dim() const override { return dim_; }
  [[nodiscard]] Vector embed(std::string_view text) const override;
  [[nodiscard]] std::string name() const override { return "hash"; }

 private:
  Eigen::Index dim_;
  std::uint64_t seed_;
};

/// Vectors read from a file of `text_hash v_1 ... v_d` lines, looked up by
/// text_hash(text). Empty text maps to reserved_empty() even if absent.
class PrecomputedEmbedder final : public TextEmbedder {
 public:
  PrecomputedEmbedder(Eigen::Index dim, std::unordered_map<std::string, Vector> table);
  static PrecomputedEmbedder load(const std::filesystem::path& path);

  [[nodiscard]] Eigen::Index dim() const override { return dim_; }
  /// Throws DataError for a text whose hash is not in the table.
  [[nodiscard]] Vector embed(std::string_view text) const override;
  [[nodiscard]] std::string name() const override { return "precomputed"; }
  [[nodiscard]] std::size_t size() const noexcept { return table_.size(); }
  [[nodiscard]] const std::unordered_map<std::string, Vector>& table() const noexcept {
    return table_;
  }

 private:
  Eigen::Index dim_;
  std::unordered_map<std::string, Vector> table_;
};

/// Memoizes another embedder by text hash.
class CachingEmbedder final : public TextEmbedder {
 public:
  explicit CachingEmbedder(std::shared_ptr<const TextEmbedder> inner);

  [[nodiscard]] Eigen::Index dim() const override { return inner_->dim(); }
  [[nodiscard]] Vector embed(std::string_view text) const override;
  [[nodiscard]] std::string name() const override { return inner_->name(); }

  /// Seeds the cache from a saved table; preloaded entries are not misses.
  /// Throws DataError on a dimension mismatch.
  void preload(const PrecomputedEmbedder& saved);

  [[nodiscard]] std::size_t cache_size() const;
  [[nodiscard]] std::size_t misses() const;
  /// Writes every cached vector in the precomputed-file format, sorted by hash.
  void save(const std::filesystem::path& path) const;

 private:
  std::shared_ptr<const TextEmbedder> inner_;
  mutable std::mutex mutex_;
  mutable std::unordered_map<std::string, Vector> cache_;
  mutable std::size_t misses_ = 0;
};

/// Writes `table` as `text_hash v_1 ... v_d` lines, sorted by hash.
void write_embedding_file(const std::filesystem::path& path,
                          const std::unordered_map<std::string, Vector>& table);

}  // namespace cross::embed
