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

#include "fairdebug/dataset.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <unordered_set>

#include "fairdebug/csv.h"
#include "fairdebug/error.h"

namespace fairdebug {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) {
    s.remove_suffix(1);
  }
  return s;
}

bool is_missing(std::string_view cell) { return cell.empty() || cell == "?"; }

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(value)) {
    return std::nullopt;
  }
  return value;
}

double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const size_t mid = values.size() / 2;
  if (values.size() % 2 == 1) return values[mid];
  return 0.5 * (values[mid - 1] + values[mid]);
}

Column numeric_column_from_rows(const std::string& name,
                                const std::vector<Instance>& rows,
                                size_t index) {
  double lo = 0.0, hi = 0.0;
  bool integral = true;
  bool first = true;
  for (const auto& row : rows) {
    const double* v = std::get_if<double>(&row[index]);
    if (v == nullptr) continue;
    if (first) {
      lo = hi = *v;
      first = false;
    }
    lo = std::min(lo, *v);
    hi = std::max(hi, *v);
    integral = integral && std::floor(*v) == *v;
  }
  return Column::numeric(name, lo, hi, integral);
}

Column categorical_column_from_rows(const std::string& name,
                                    const std::vector<Instance>& rows,
                                    size_t index) {
  std::vector<std::string> categories;
  std::unordered_set<std::string> seen;
  for (const auto& row : rows) {
    const auto* s = std::get_if<std::string>(&row[index]);
    if (s != nullptr && seen.insert(*s).second) categories.push_back(*s);
  }
  return Column::categorical(name, std::move(categories));
}

}  // namespace

std::string_view column_kind_name(ColumnKind kind) {
  return kind == ColumnKind::kNumeric ? "numeric" : "categorical";
}

ColumnKind parse_column_kind(std::string_view name) {
  if (name == "numeric") return ColumnKind::kNumeric;
  if (name == "categorical") return ColumnKind::kCategorical;
  throw Error(ErrorCode::kFormat,
              "unknown column kind '" + std::string(name) + "'");
}

std::string format_number(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

Column Column::categorical(std::string name,
                           std::vector<std::string> categories) {
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::kCategorical;
  c.categories_ = std::move(categories);
  for (size_t i = 0; i < c.categories_.size(); ++i) {
    c.codes_.emplace(c.categories_[i], static_cast<int32_t>(i));
  }
  return c;
}

Column Column::numeric(std::string name, double min, double max,
                       bool integral) {
  Column c;
  c.name_ = std::move(name);
  c.kind_ = ColumnKind::kNumeric;
  c.min_ = min;
  c.max_ = max;
  c.integral_ = integral;
  return c;
}

std::optional<int32_t> Column::code_of(std::string_view value) const {
  const auto it = codes_.find(std::string(value));
  if (it == codes_.end()) return std::nullopt;
  return it->second;
}

const std::string& Column::decode(int32_t code) const {
  return categories_.at(static_cast<size_t>(code));
}

bool Column::operator==(const Column& other) const {
  return name_ == other.name_ && kind_ == other.kind_ &&
         categories_ == other.categories_ && min_ == other.min_ &&
         max_ == other.max_ && integral_ == other.integral_;
}

std::optional<size_t> Schema::index_of(std::string_view name) const {
  for (size_t i = 0; i < columns.size(); ++i) {
    if (columns[i].name() == name) return i;
  }
  return std::nullopt;
}

size_t Schema::require_index(std::string_view name) const {
  const auto index = index_of(name);
  if (!index) {
    throw Error(ErrorCode::kSchema,
                "unknown column '" + std::string(name) + "'");
  }
  return *index;
}

size_t Schema::protected_index() const {
  if (!has_protected()) {
    throw Error(ErrorCode::kSchema, "protected attribute is not set");
  }
  return require_index(protected_column);
}

std::optional<size_t> Schema::group_of(std::string_view value) const {
  for (size_t g = 0; g < protected_groups.size(); ++g) {
    if (protected_groups[g] == value) return g;
  }
  return std::nullopt;
}

void Schema::validate() const {
  const Column& label = column(label_column);
  if (!label.is_categorical() || label.categories().size() != 2) {
    throw Error(ErrorCode::kSchema,
                "label column '" + label_column + "' must have two values");
  }
  if (!label.code_of(positive_label)) {
    throw Error(ErrorCode::kSchema, "positive label '" + positive_label +
                                        "' is not a value of '" +
                                        label_column + "'");
  }
  for (const auto& c : columns) {
    if (c.is_categorical() && c.categories().empty()) {
      throw Error(ErrorCode::kSchema,
                  "categorical column '" + c.name() + "' has no values");
    }
  }
  if (!has_protected()) return;
  const Column& prot = column(protected_column);
  if (!prot.is_categorical()) {
    throw Error(ErrorCode::kSchema, "protected column '" + protected_column +
                                        "' must be categorical");
  }
  if (protected_column == label_column) {
    throw Error(ErrorCode::kSchema,
                "the label column cannot be the protected attribute");
  }
  if (protected_groups.size() < 2) {
    throw Error(ErrorCode::kSchema, "at least two protected groups required");
  }
  std::set<std::string> unique;
  for (const auto& g : protected_groups) {
    if (!prot.code_of(g)) {
      throw Error(ErrorCode::kSchema, "group '" + g + "' is not a value of '" +
                                          protected_column + "'");
    }
    if (!unique.insert(g).second) {
      throw Error(ErrorCode::kSchema, "duplicate protected group '" + g + "'");
    }
  }
}

std::string value_to_string(const Value& value) {
  if (const auto* d = std::get_if<double>(&value)) return format_number(*d);
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  return "";
}

nlohmann::json value_to_json(const Value& value) {
  if (const auto* d = std::get_if<double>(&value)) return *d;
  if (const auto* s = std::get_if<std::string>(&value)) return *s;
  return nullptr;
}

nlohmann::json instance_to_json(const Schema& schema, const Instance& x) {
  // nlohmann::ordered_json would keep schema order, but the canonical form is
  // sorted keys; consumers look values up by name.
  nlohmann::json j = nlohmann::json::object();
  for (size_t i = 0; i < schema.columns.size() && i < x.size(); ++i) {
    j[schema.columns[i].name()] = value_to_json(x[i]);
  }
  return j;
}

Instance instance_from_json(const Schema& schema, const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kFormat, "instance must be a JSON object");
  }
  Instance x;
  x.values.assign(schema.columns.size(), std::monostate{});
  for (const auto& [key, value] : j.items()) {
    const size_t index = schema.require_index(key);
    const Column& col = schema.columns[index];
    if (value.is_null()) continue;
    if (col.is_numeric()) {
      if (value.is_number()) {
        x[index] = value.get<double>();
      } else if (value.is_string()) {
        const auto parsed = parse_number(trim(value.get<std::string>()));
        if (!parsed) {
          throw Error(ErrorCode::kValidity,
                      "column '" + key + "' expects a number");
        }
        x[index] = *parsed;
      } else {
        throw Error(ErrorCode::kValidity,
                    "column '" + key + "' expects a number");
      }
    } else {
      if (value.is_string()) {
        x[index] = value.get<std::string>();
      } else if (value.is_number()) {
        x[index] = format_number(value.get<double>());
      } else {
        throw Error(ErrorCode::kValidity,
                    "column '" + key + "' expects a string");
      }
    }
  }
  return x;
}

Dataset::Dataset(Schema schema, std::vector<Instance> rows)
    : schema_(std::move(schema)), rows_(std::move(rows)) {}

bool Dataset::label_positive(size_t row) const {
  const auto* s = std::get_if<std::string>(&rows_[row][schema_.label_index()]);
  return s != nullptr && *s == schema_.positive_label;
}

std::vector<double> Dataset::encode(const Instance& x) const {
  std::vector<double> out(schema_.columns.size());
  for (size_t i = 0; i < out.size(); ++i) {
    const Column& col = schema_.columns[i];
    if (col.is_numeric()) {
      const double* d = std::get_if<double>(&x[i]);
      out[i] = d ? *d : std::nan("");
    } else {
      const auto* s = std::get_if<std::string>(&x[i]);
      const auto code = s ? col.code_of(*s) : std::nullopt;
      out[i] = code ? *code : -1;
    }
  }
  return out;
}

Instance Dataset::decode(std::span<const double> encoded) const {
  Instance x;
  x.values.resize(schema_.columns.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const Column& col = schema_.columns[i];
    if (col.is_numeric()) {
      if (!std::isnan(encoded[i])) x[i] = encoded[i];
    } else if (encoded[i] >= 0) {
      x[i] = col.decode(static_cast<int32_t>(encoded[i]));
    }
  }
  return x;
}

Dataset Dataset::subset(std::span<const size_t> indices) const {
  std::vector<Instance> rows;
  rows.reserve(indices.size());
  for (size_t i : indices) rows.push_back(rows_.at(i));
  return Dataset(schema_, std::move(rows));
}

Dataset Dataset::with_schema(Schema schema) const {
  return Dataset(std::move(schema), rows_);
}

KindOverrides parse_kind_overrides(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat,
                std::string("schema override is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorCode::kFormat, "schema override must be a JSON object");
  }
  KindOverrides out;
  for (const auto& [column, kind] : j.items()) {
    if (!kind.is_string()) {
      throw Error(ErrorCode::kFormat,
                  "kind for column '" + column + "' must be a string");
    }
    out[column] = parse_column_kind(kind.get<std::string>());
  }
  return out;
}

Dataset ingest_csv(std::string_view text, std::string_view label_column,
                   std::string_view positive_label,
                   const KindOverrides& overrides) {
  std::vector<csv::Record> records = csv::parse(text);
  // Blank lines parse as a single empty field.
  std::erase_if(records, [](const csv::Record& r) {
    return r.size() == 1 && trim(r[0]).empty();
  });
  if (records.empty()) {
    throw Error(ErrorCode::kSchema, "empty dataset: no header row");
  }
  std::vector<std::string> header;
  for (const auto& name : records[0]) header.emplace_back(trim(name));
  {
    std::set<std::string> unique;
    for (const auto& name : header) {
      if (name.empty()) throw Error(ErrorCode::kParse, "empty column name");
      if (!unique.insert(name).second) {
        throw Error(ErrorCode::kParse, "duplicate column '" + name + "'");
      }
    }
  }
  const size_t width = header.size();
  const size_t n = records.size() - 1;
  if (n == 0) throw Error(ErrorCode::kSchema, "empty dataset: no data rows");
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      throw Error(ErrorCode::kParse,
                  "row " + std::to_string(r) + " has " +
                      std::to_string(records[r].size()) + " fields, expected " +
                      std::to_string(width));
    }
  }
  for (const auto& [name, kind] : overrides) {
    if (std::find(header.begin(), header.end(), name) == header.end()) {
      throw Error(ErrorCode::kSchema,
                  "schema override names unknown column '" + name + "'");
    }
  }
  const auto label_it =
      std::find(header.begin(), header.end(), std::string(label_column));
  if (label_it == header.end()) {
    throw Error(ErrorCode::kSchema,
                "label column '" + std::string(label_column) + "' not found");
  }
  const size_t label_index = label_it - header.begin();

  std::vector<Instance> rows(n);
  for (auto& row : rows) row.values.resize(width);
  std::vector<Column> columns(width);

  for (size_t c = 0; c < width; ++c) {
    ColumnKind kind = ColumnKind::kNumeric;
    if (c == label_index) {
      kind = ColumnKind::kCategorical;
    } else if (const auto it = overrides.find(header[c]); it != overrides.end()) {
      kind = it->second;
    } else {
      bool any = false;
      for (size_t r = 0; r < n && kind == ColumnKind::kNumeric; ++r) {
        const auto cell = trim(records[r + 1][c]);
        if (is_missing(cell)) continue;
        any = true;
        if (!parse_number(cell)) kind = ColumnKind::kCategorical;
      }
      if (!any) kind = ColumnKind::kCategorical;
    }

    if (kind == ColumnKind::kNumeric) {
      std::vector<double> observed;
      observed.reserve(n);
      std::vector<std::optional<double>> parsed(n);
      for (size_t r = 0; r < n; ++r) {
        const auto cell = trim(records[r + 1][c]);
        if (is_missing(cell)) continue;
        parsed[r] = parse_number(cell);
        if (!parsed[r]) {
          throw Error(ErrorCode::kSchema,
                      "column '" + header[c] + "' forced numeric but row " +
                          std::to_string(r + 1) + " holds '" +
                          std::string(cell) + "'");
        }
        observed.push_back(*parsed[r]);
      }
      const double fill = median(observed);
      for (size_t r = 0; r < n; ++r) rows[r][c] = parsed[r].value_or(fill);
      columns[c] = numeric_column_from_rows(header[c], rows, c);
    } else {
      for (size_t r = 0; r < n; ++r) {
        const auto cell = trim(records[r + 1][c]);
        rows[r][c] = std::string(is_missing(cell) ? kUnknownToken : cell);
      }
      columns[c] = categorical_column_from_rows(header[c], rows, c);
    }
  }

  const Column& label = columns[label_index];
  if (label.categories().size() != 2) {
    throw Error(ErrorCode::kSchema,
                "label column '" + std::string(label_column) + "' has " +
                    std::to_string(label.categories().size()) +
                    " distinct values; binary classification needs exactly 2");
  }
  if (!label.code_of(positive_label)) {
    throw Error(ErrorCode::kSchema, "positive label '" +
                                        std::string(positive_label) +
                                        "' does not occur in '" +
                                        std::string(label_column) + "'");
  }

  Schema schema;
  schema.columns = std::move(columns);
  schema.label_column = std::string(label_column);
  schema.positive_label = std::string(positive_label);
  schema.validate();
  return Dataset(std::move(schema), std::move(rows));
}

Dataset set_protected(const Dataset& ds, std::string_view column,
                      std::vector<std::string> groups) {
  Schema schema = ds.schema();
  const Column& col = schema.column(column);
  if (!col.is_categorical()) {
    throw Error(ErrorCode::kSchema,
                "protected column '" + std::string(column) +
                    "' is numeric; only categorical protected attributes are "
                    "supported");
  }
  schema.protected_column = std::string(column);
  schema.protected_groups = std::move(groups);
  schema.validate();
  return ds.with_schema(std::move(schema));
}

SplitPair split_from_indices(const Dataset& ds, uint64_t seed,
                             std::vector<size_t> train_indices,
                             std::vector<size_t> test_indices) {
  SplitPair split;
  split.seed = seed;
  split.train = ds.subset(train_indices);
  split.test = ds.subset(test_indices);
  split.train_indices = std::move(train_indices);
  split.test_indices = std::move(test_indices);
  return split;
}

SplitPair split_80_20(const Dataset& ds, uint64_t seed) {
  const size_t n = ds.size();
  if (n < 5) {
    throw Error(ErrorCode::kSize, "need at least 5 rows to split, got " +
                                      std::to_string(n));
  }
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  const size_t n_train = static_cast<size_t>(std::llround(0.8 * n));
  std::vector<size_t> train(order.begin(), order.begin() + n_train);
  std::vector<size_t> test(order.begin() + n_train, order.end());
  return split_from_indices(ds, seed, std::move(train), std::move(test));
}

Dataset mask(const Dataset& ds, std::string_view column,
             const std::optional<std::vector<std::string>>& values) {
  const Schema& schema = ds.schema();
  const size_t index = schema.require_index(column);
  if (column == schema.label_column) {
    throw Error(ErrorCode::kUsage, "cannot mask the label column");
  }
  if (schema.has_protected() && column == schema.protected_column) {
    throw Error(ErrorCode::kUsage, "cannot mask the protected column");
  }
  const Column& col = schema.columns[index];
  std::unordered_set<std::string> targets;
  if (values) {
    if (!col.is_categorical()) {
      throw Error(ErrorCode::kUsage, "value masking needs a categorical column");
    }
    const bool already_masked = col.code_of(kMaskedToken).has_value();
    for (const auto& v : *values) {
      // Values collapsed by an earlier mask are gone from the domain; that
      // keeps mask idempotent.
      if (!col.code_of(v) && !already_masked) {
        throw Error(ErrorCode::kUsage, "'" + v + "' is not a value of '" +
                                           std::string(column) + "'");
      }
      targets.insert(v);
    }
  }
  std::vector<Instance> rows = ds.rows();
  for (auto& row : rows) {
    if (!values) {
      row[index] = std::string(kMaskedToken);
    } else if (const auto* s = std::get_if<std::string>(&row[index]);
               s != nullptr && targets.count(*s)) {
      row[index] = std::string(kMaskedToken);
    }
  }
  Schema out = schema;
  out.columns[index] = categorical_column_from_rows(col.name(), rows, index);
  out.validate();
  return Dataset(std::move(out), std::move(rows));
}

std::string to_csv(const Dataset& ds) {
  std::string out;
  csv::Record header;
  for (const auto& c : ds.schema().columns) header.push_back(c.name());
  out += csv::format_record(header);
  out.push_back('\n');
  csv::Record record(header.size());
  for (const auto& row : ds.rows()) {
    for (size_t i = 0; i < row.size(); ++i) record[i] = value_to_string(row[i]);
    out += csv::format_record(record);
    out.push_back('\n');
  }
  return out;
}

nlohmann::json schema_to_json(const Schema& schema) {
  nlohmann::json columns = nlohmann::json::array();
  for (const auto& c : schema.columns) {
    nlohmann::json jc = {{"name", c.name()},
                         {"kind", column_kind_name(c.kind())}};
    if (c.is_categorical()) {
      jc["domain"] = c.categories();
    } else {
      jc["min"] = c.min();
      jc["max"] = c.max();
      jc["integral"] = c.integral();
    }
    columns.push_back(std::move(jc));
  }
  return {{"columns", std::move(columns)},
          {"label_column", schema.label_column},
          {"positive_label", schema.positive_label},
          {"protected_column", schema.protected_column},
          {"protected_groups", schema.protected_groups}};
}

Schema schema_from_json(const nlohmann::json& j) {
  try {
    Schema schema;
    for (const auto& jc : j.at("columns")) {
      const auto name = jc.at("name").get<std::string>();
      if (parse_column_kind(jc.at("kind").get<std::string>()) ==
          ColumnKind::kNumeric) {
        schema.columns.push_back(Column::numeric(
            name, jc.at("min").get<double>(), jc.at("max").get<double>(),
            jc.at("integral").get<bool>()));
      } else {
        schema.columns.push_back(Column::categorical(
            name, jc.at("domain").get<std::vector<std::string>>()));
      }
    }
    schema.label_column = j.at("label_column").get<std::string>();
    schema.positive_label = j.at("positive_label").get<std::string>();
    schema.protected_column = j.at("protected_column").get<std::string>();
    schema.protected_groups =
        j.at("protected_groups").get<std::vector<std::string>>();
    schema.validate();
    return schema;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad schema JSON: ") + e.what());
  }
}

}  // namespace fairdebug
