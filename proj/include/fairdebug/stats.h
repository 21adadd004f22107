/*
 * Copyright 2026 The fairdebug Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef FAIRDEBUG_STATS_H_
#define FAIRDEBUG_STATS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fairdebug/dataset.h"
#include "json.hpp"

namespace fairdebug {

// Cramér's V between two categorical variables given as codes. Pairs where
// either code is negative are skipped. 0 when either variable is constant.
double cramers_v(std::span<const int32_t> x, std::span<const int32_t> y);

// Correlation ratio (eta) of `values` grouped by `groups`. Entries with a
// negative group are skipped. 0 when the values are constant.
double correlation_ratio(std::span<const double> values,
                         std::span<const int32_t> groups);

// Linear-interpolation quantile of already sorted data, q in [0, 1].
double quantile_sorted(std::span<const double> sorted, double q);

// Quartile binning of a numeric column. Edges come from the reference data;
// duplicate edges collapse so every bin is non-degenerate.
class QuartileBinner {
 public:
  QuartileBinner() = default;
  QuartileBinner(std::string column, std::vector<double> values);

  size_t bin_count() const { return edges_.size() + 1; }
  size_t bin(double value) const;
  // e.g. "age <= 28", "28 < age <= 37", "age > 48".
  std::string label(size_t bin) const;
  const std::vector<double>& edges() const { return edges_; }

 private:
  std::string column_;
  std::vector<double> edges_;
};

struct HistogramBin {
  std::string value;
  std::vector<size_t> counts;        // per protected group
  std::vector<double> proportions;   // per protected group, sums to 1
};

struct ColumnInteraction {
  std::string column;
  ColumnKind kind = ColumnKind::kCategorical;
  std::string statistic;  // "cramers_v" or "correlation_ratio"
  double association = 0.0;
  std::vector<HistogramBin> histogram;
};

struct InteractionReport {
  std::string protected_column;
  std::vector<std::string> groups;
  // Schema order, label and protected column excluded.
  std::vector<ColumnInteraction> columns;

  const ColumnInteraction* find(std::string_view column) const;
};

// Association of every non-protected feature with the protected attribute,
// over rows whose protected value is one of the configured groups.
InteractionReport interactions(const Dataset& ds);

void to_json(nlohmann::json& j, const InteractionReport& report);
void to_json(nlohmann::json& j, const ColumnInteraction& column);

}  // namespace fairdebug

#endif  // FAIRDEBUG_STATS_H_
