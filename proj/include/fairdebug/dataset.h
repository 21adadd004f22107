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

#ifndef FAIRDEBUG_DATASET_H_
#define FAIRDEBUG_DATASET_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

#include "json.hpp"

namespace fairdebug {

enum class ColumnKind { kCategorical, kNumeric };

std::string_view column_kind_name(ColumnKind kind);
ColumnKind parse_column_kind(std::string_view name);

// Token substituted for missing categorical cells.
inline constexpr std::string_view kUnknownToken = "Unknown";
// Token that replaces masked categorical values.
inline constexpr std::string_view kMaskedToken = "masked";

// A column and its observed domain. For categorical columns the position of a
// value in `categories` is its integer code (first-appearance order).
class Column {
 public:
  Column() = default;
  static Column categorical(std::string name,
                            std::vector<std::string> categories);
  static Column numeric(std::string name, double min, double max,
                        bool integral);

  const std::string& name() const { return name_; }
  ColumnKind kind() const { return kind_; }
  bool is_categorical() const { return kind_ == ColumnKind::kCategorical; }
  bool is_numeric() const { return kind_ == ColumnKind::kNumeric; }

  const std::vector<std::string>& categories() const { return categories_; }
  std::optional<int32_t> code_of(std::string_view value) const;
  const std::string& decode(int32_t code) const;

  double min() const { return min_; }
  double max() const { return max_; }
  // True when every observed value is a whole number.
  bool integral() const { return integral_; }

  bool operator==(const Column& other) const;

 private:
  std::string name_;
  ColumnKind kind_ = ColumnKind::kCategorical;
  std::vector<std::string> categories_;
  std::unordered_map<std::string, int32_t> codes_;
  double min_ = 0.0;
  double max_ = 0.0;
  bool integral_ = false;
};

struct Schema {
  std::vector<Column> columns;
  std::string label_column;
  std::string positive_label;
  std::string protected_column;  // empty until set_protected
  std::vector<std::string> protected_groups;

  std::optional<size_t> index_of(std::string_view name) const;
  // Throws Error(kSchema) for an unknown column.
  size_t require_index(std::string_view name) const;
  const Column& column(std::string_view name) const {
    return columns[require_index(name)];
  }
  size_t label_index() const { return require_index(label_column); }
  bool has_protected() const { return !protected_column.empty(); }
  size_t protected_index() const;
  // Index of the group `value` belongs to, or nullopt when it is not one of
  // the configured protected groups.
  std::optional<size_t> group_of(std::string_view value) const;

  // Re-checks the schema invariants; throws Error(kSchema).
  void validate() const;

  bool operator==(const Schema& other) const = default;
};

// A single cell. monostate marks an unknown value (e.g. the label of a
// generated test input).
using Value = std::variant<std::monostate, double, std::string>;

std::string value_to_string(const Value& value);
nlohmann::json value_to_json(const Value& value);

struct Instance {
  std::vector<Value> values;

  const Value& operator[](size_t i) const { return values[i]; }
  Value& operator[](size_t i) { return values[i]; }
  size_t size() const { return values.size(); }
  bool operator==(const Instance& other) const = default;
};

// Instance as a column-name keyed JSON object (in schema order).
nlohmann::json instance_to_json(const Schema& schema, const Instance& x);
// Parses a column-name keyed object. Missing columns become monostate; values
// are checked against the schema kinds but not against domains.
Instance instance_from_json(const Schema& schema, const nlohmann::json& j);

// Immutable after construction; all operations return new datasets.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Schema schema, std::vector<Instance> rows);

  const Schema& schema() const { return schema_; }
  const std::vector<Instance>& rows() const { return rows_; }
  size_t size() const { return rows_.size(); }
  bool empty() const { return rows_.empty(); }

  bool label_positive(size_t row) const;

  // Categorical cells become their integer code, numeric cells stay as is.
  // Unknown categorical values encode as -1.
  std::vector<double> encode(const Instance& x) const;
  Instance decode(std::span<const double> encoded) const;

  Dataset subset(std::span<const size_t> indices) const;
  Dataset with_schema(Schema schema) const;

  bool operator==(const Dataset& other) const = default;

 private:
  Schema schema_;
  std::vector<Instance> rows_;
};

// column name -> forced kind.
using KindOverrides = std::map<std::string, ColumnKind>;

// Parses {"col": "categorical" | "numeric", ...}. Throws Error(kFormat).
KindOverrides parse_kind_overrides(std::string_view json_text);

// Builds a dataset from CSV text with a header row. The label column is always
// categorical and must have exactly two distinct values, one of which is
// `positive_label`. Empty cells and "?" are missing: categorical cells become
// kUnknownToken, numeric cells the column median.
Dataset ingest_csv(std::string_view text, std::string_view label_column,
                   std::string_view positive_label,
                   const KindOverrides& overrides = {});

// Selects the protected attribute. groups[0] is the reference group.
Dataset set_protected(const Dataset& ds, std::string_view column,
                      std::vector<std::string> groups);

struct SplitPair {
  Dataset train;
  Dataset test;
  uint64_t seed = 0;
  std::vector<size_t> train_indices;
  std::vector<size_t> test_indices;
};

// Deterministic shuffle under `seed`; |train| = round(0.8 N).
SplitPair split_80_20(const Dataset& ds, uint64_t seed);
// Rebuilds a split from stored indices.
SplitPair split_from_indices(const Dataset& ds, uint64_t seed,
                             std::vector<size_t> train_indices,
                             std::vector<size_t> test_indices);

// Without values the whole column collapses to kMaskedToken (and becomes
// categorical). With values only those categories collapse.
Dataset mask(const Dataset& ds, std::string_view column,
             const std::optional<std::vector<std::string>>& values);

// Writes the dataset back as CSV (header + rows, doubles in round-trip form).
std::string to_csv(const Dataset& ds);

nlohmann::json schema_to_json(const Schema& schema);
Schema schema_from_json(const nlohmann::json& j);

std::string format_number(double value);

}  // namespace fairdebug

#endif  // FAIRDEBUG_DATASET_H_
