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

#include "fairdebug/stats.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "fairdebug/error.h"

namespace fairdebug {

double cramers_v(std::span<const int32_t> x, std::span<const int32_t> y) {
  std::map<int32_t, size_t> xs, ys;
  std::map<std::pair<int32_t, int32_t>, size_t> joint;
  size_t n = 0;
  for (size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] < 0 || y[i] < 0) continue;
    ++xs[x[i]];
    ++ys[y[i]];
    ++joint[{x[i], y[i]}];
    ++n;
  }
  const size_t k = std::min(xs.size(), ys.size());
  if (n == 0 || k < 2) return 0.0;
  double chi2 = 0.0;
  for (const auto& [a, na] : xs) {
    for (const auto& [b, nb] : ys) {
      const double expected = static_cast<double>(na) * nb / n;
      const auto it = joint.find({a, b});
      const double observed = it == joint.end() ? 0.0 : it->second;
      const double d = observed - expected;
      chi2 += d * d / expected;
    }
  }
  const double v = std::sqrt(chi2 / (static_cast<double>(n) * (k - 1)));
  return std::clamp(v, 0.0, 1.0);
}

double correlation_ratio(std::span<const double> values,
                         std::span<const int32_t> groups) {
  std::map<int32_t, std::pair<double, size_t>> sums;
  double total = 0.0;
  size_t n = 0;
  for (size_t i = 0; i < values.size() && i < groups.size(); ++i) {
    if (groups[i] < 0) continue;
    auto& [s, c] = sums[groups[i]];
    s += values[i];
    ++c;
    total += values[i];
    ++n;
  }
  if (n == 0) return 0.0;
  const double mean = total / n;
  double ss_total = 0.0;
  for (size_t i = 0; i < values.size() && i < groups.size(); ++i) {
    if (groups[i] < 0) continue;
    ss_total += (values[i] - mean) * (values[i] - mean);
  }
  if (ss_total <= 0.0) return 0.0;
  double ss_between = 0.0;
  for (const auto& [g, sc] : sums) {
    const double group_mean = sc.first / sc.second;
    ss_between += sc.second * (group_mean - mean) * (group_mean - mean);
  }
  return std::clamp(std::sqrt(ss_between / ss_total), 0.0, 1.0);
}

double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * (sorted.size() - 1);
  const size_t lo = static_cast<size_t>(std::floor(pos));
  const size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - lo;
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

QuartileBinner::QuartileBinner(std::string column, std::vector<double> values)
    : column_(std::move(column)) {
  std::sort(values.begin(), values.end());
  if (values.empty()) return;
  for (double q : {0.25, 0.5, 0.75}) {
    const double edge = quantile_sorted(values, q);
    // An edge at or above the maximum would leave an empty top bin.
    if (edge >= values.back()) continue;
    if (edges_.empty() || edge > edges_.back()) edges_.push_back(edge);
  }
}

size_t QuartileBinner::bin(double value) const {
  return std::lower_bound(edges_.begin(), edges_.end(), value) - edges_.begin();
}

std::string QuartileBinner::label(size_t bin) const {
  if (edges_.empty()) return column_ + " (all)";
  if (bin == 0) return column_ + " <= " + format_number(edges_.front());
  if (bin >= edges_.size()) return column_ + " > " + format_number(edges_.back());
  return format_number(edges_[bin - 1]) + " < " + column_ +
         " <= " + format_number(edges_[bin]);
}

const ColumnInteraction* InteractionReport::find(
    std::string_view column) const {
  for (const auto& c : columns) {
    if (c.column == column) return &c;
  }
  return nullptr;
}

InteractionReport interactions(const Dataset& ds) {
  const Schema& schema = ds.schema();
  const size_t prot = schema.protected_index();
  const size_t n_groups = schema.protected_groups.size();

  std::vector<int32_t> group(ds.size(), -1);
  for (size_t r = 0; r < ds.size(); ++r) {
    if (const auto* s = std::get_if<std::string>(&ds.rows()[r][prot])) {
      if (const auto g = schema.group_of(*s)) group[r] = static_cast<int32_t>(*g);
    }
  }

  InteractionReport report;
  report.protected_column = schema.protected_column;
  report.groups = schema.protected_groups;

  for (size_t c = 0; c < schema.columns.size(); ++c) {
    if (c == prot || c == schema.label_index()) continue;
    const Column& col = schema.columns[c];
    ColumnInteraction out;
    out.column = col.name();
    out.kind = col.kind();

    // Histogram bin of each row, -1 for rows outside the protected groups.
    std::vector<int32_t> bins(ds.size(), -1);
    std::vector<std::string> bin_names;
    if (col.is_categorical()) {
      out.statistic = "cramers_v";
      std::vector<int32_t> codes(ds.size(), -1);
      for (size_t r = 0; r < ds.size(); ++r) {
        const auto* s = std::get_if<std::string>(&ds.rows()[r][c]);
        if (const auto code = s ? col.code_of(*s) : std::nullopt) {
          codes[r] = *code;
        }
      }
      out.association = cramers_v(codes, group);
      bins = codes;
      bin_names = col.categories();
    } else {
      out.statistic = "correlation_ratio";
      std::vector<double> values(ds.size(), 0.0);
      std::vector<double> in_groups;
      for (size_t r = 0; r < ds.size(); ++r) {
        values[r] = std::get<double>(ds.rows()[r][c]);
        if (group[r] >= 0) in_groups.push_back(values[r]);
      }
      out.association = correlation_ratio(values, group);
      const QuartileBinner binner(col.name(), std::move(in_groups));
      for (size_t r = 0; r < ds.size(); ++r) {
        bins[r] = static_cast<int32_t>(binner.bin(values[r]));
      }
      for (size_t b = 0; b < binner.bin_count(); ++b) {
        bin_names.push_back(binner.label(b));
      }
    }

    std::vector<std::vector<size_t>> counts(bin_names.size(),
                                            std::vector<size_t>(n_groups, 0));
    for (size_t r = 0; r < ds.size(); ++r) {
      if (group[r] < 0 || bins[r] < 0) continue;
      ++counts[bins[r]][group[r]];
    }
    for (size_t b = 0; b < bin_names.size(); ++b) {
      size_t total = 0;
      for (size_t k : counts[b]) total += k;
      // A value never seen in the protected groups has no distribution.
      if (total == 0) continue;
      HistogramBin bin;
      bin.value = bin_names[b];
      bin.counts = counts[b];
      for (size_t k : counts[b]) {
        bin.proportions.push_back(static_cast<double>(k) / total);
      }
      out.histogram.push_back(std::move(bin));
    }
    report.columns.push_back(std::move(out));
  }
  return report;
}

void to_json(nlohmann::json& j, const ColumnInteraction& column) {
  nlohmann::json histogram = nlohmann::json::array();
  for (const auto& bin : column.histogram) {
    histogram.push_back({{"value", bin.value},
                         {"counts", bin.counts},
                         {"proportions", bin.proportions}});
  }
  j = {{"column", column.column},
       {"kind", column_kind_name(column.kind)},
       {"statistic", column.statistic},
       {"association_score", column.association},
       {"histogram", std::move(histogram)}};
}

void to_json(nlohmann::json& j, const InteractionReport& report) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : report.columns) columns.push_back(c);
  j = {{"protected_column", report.protected_column},
       {"groups", report.groups},
       {"columns", std::move(columns)}};
}

}  // namespace fairdebug
