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
#include <span>
#include <string>
#include <vector>

namespace cross::train {

/// 1 / rank of `positive` among itself and `negatives`; a tied block shares
/// its mean rank, so rank = 1 + #greater + #tied / 2.
double reciprocal_rank(double positive, std::span<const double> negatives);

double mean(std::span<const double> values);
/// Population standard deviation (0 for a single value).
double stddev(std::span<const double> values);

/// Area under the ROC curve via the Mann-Whitney statistic with mid-ranks.
/// Throws DataError unless both classes are present.
double roc_auc(std::span<const double> scores, std::span<const int> labels);

/// One metric over one or more seeds.
struct MetricsReport {
  std::string task;     // "link_prediction" or "node_classification"
  std::string setting;  // "transductive" or "inductive"
  std::string metric;   // "mrr" or "auc"
  std::vector<std::uint64_t> seeds;
  std::vector<double> values;

  [[nodiscard]] double mean() const { return train::mean(values); }
  [[nodiscard]] double stddev() const { return train::stddev(values); }
};

}  // namespace cross::train
