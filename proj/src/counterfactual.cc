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

#include "fairdebug/counterfactual.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "fairdebug/error.h"
#include "fairdebug/util.h"

namespace fairdebug {

namespace {

using nlohmann::json;

// Values actually present in the rows of `ds`, per column.
struct ObservedDomain {
  std::vector<std::vector<std::string>> categories;
  std::vector<double> min, max;
  std::vector<bool> integral;
};

ObservedDomain observe(const Dataset& ds) {
  const Schema& schema = ds.schema();
  const size_t width = schema.columns.size();
  ObservedDomain d;
  d.categories.resize(width);
  d.min.assign(width, 0.0);
  d.max.assign(width, 0.0);
  d.integral.assign(width, true);
  for (size_t c = 0; c < width; ++c) {
    const Column& col = schema.columns[c];
    if (col.is_categorical()) {
      std::vector<bool> present(col.categories().size(), false);
      for (const auto& row : ds.rows()) {
        const auto* s = std::get_if<std::string>(&row[c]);
        if (const auto code = s ? col.code_of(*s) : std::nullopt) {
          present[*code] = true;
        }
      }
      for (size_t k = 0; k < present.size(); ++k) {
        if (present[k]) d.categories[c].push_back(col.categories()[k]);
      }
    } else {
      bool first = true;
      for (const auto& row : ds.rows()) {
        const double v = std::get<double>(row[c]);
        d.min[c] = first ? v : std::min(d.min[c], v);
        d.max[c] = first ? v : std::max(d.max[c], v);
        d.integral[c] = d.integral[c] && std::floor(v) == v;
        first = false;
      }
    }
  }
  return d;
}

const std::string* string_value(const Instance& x, size_t i) {
  return std::get_if<std::string>(&x[i]);
}

}  // namespace

std::string_view category_name(PairCategory category) {
  switch (category) {
    case PairCategory::kBothPositive:
      return "both_positive";
    case PairCategory::kBothNegative:
      return "both_negative";
    case PairCategory::kOriginalFavored:
      return "original_favored";
    case PairCategory::kCounterfactualFavored:
      return "counterfactual_favored";
  }
  return "unknown";
}

PairCategory parse_category(std::string_view name) {
  for (PairCategory c :
       {PairCategory::kBothPositive, PairCategory::kBothNegative,
        PairCategory::kOriginalFavored, PairCategory::kCounterfactualFavored}) {
    if (category_name(c) == name) return c;
  }
  throw Error(ErrorCode::kUsage, "unknown category '" + std::string(name) + "'");
}

PairCategory categorize(double p_original, double p_counterfactual) {
  const bool a = is_positive(p_original);
  const bool b = is_positive(p_counterfactual);
  if (a && b) return PairCategory::kBothPositive;
  if (!a && !b) return PairCategory::kBothNegative;
  return a ? PairCategory::kOriginalFavored
           : PairCategory::kCounterfactualFavored;
}

std::string pair_id(uint64_t seed, size_t index) {
  return "t-" + to_hex(mix_seed(seed, index));
}

TestPair make_pair(const Classifier& model, std::string id, size_t index,
                   Instance original, Instance counterfactual) {
  TestPair p;
  p.id = std::move(id);
  p.index = index;
  p.proba_original = model.predict_proba(original);
  p.proba_counterfactual = model.predict_proba(counterfactual);
  p.original = std::move(original);
  p.counterfactual = std::move(counterfactual);
  p.category = categorize(p.proba_original, p.proba_counterfactual);
  p.is_id = is_discriminatory(p.category);
  return p;
}

std::vector<TestPair> generate(const Classifier& model, const Dataset& ds,
                               size_t n, uint64_t seed, size_t threads) {
  const Schema& schema = ds.schema();
  const size_t prot = schema.protected_index();
  if (schema.protected_groups.size() != 2) {
    throw Error(ErrorCode::kUsage,
                "test generation needs exactly two protected groups");
  }
  if (n == 0) throw Error(ErrorCode::kSize, "n must be at least 1");
  if (ds.empty()) throw Error(ErrorCode::kSize, "no rows to sample domains from");
  const ObservedDomain domain = observe(ds);
  const size_t label = schema.label_index();
  const size_t width = schema.columns.size();

  std::vector<TestPair> pairs(n);
  parallel_for(n, threads == 0 ? default_thread_count() : threads,
               [&](size_t i) {
    std::mt19937_64 rng(mix_seed(seed, i));
    Instance x;
    x.values.resize(width);
    size_t group = 0;
    for (size_t c = 0; c < width; ++c) {
      if (c == label) continue;
      if (c == prot) {
        group = std::uniform_int_distribution<size_t>(0, 1)(rng);
        x[c] = schema.protected_groups[group];
        continue;
      }
      if (schema.columns[c].is_categorical()) {
        const auto& cats = domain.categories[c];
        x[c] = cats[std::uniform_int_distribution<size_t>(0, cats.size() - 1)(rng)];
      } else if (domain.integral[c]) {
        x[c] = static_cast<double>(std::uniform_int_distribution<long long>(
            std::llround(domain.min[c]), std::llround(domain.max[c]))(rng));
      } else if (domain.min[c] == domain.max[c]) {
        x[c] = domain.min[c];
      } else {
        x[c] = std::uniform_real_distribution<double>(domain.min[c],
                                                      domain.max[c])(rng);
      }
    }
    Instance cf = x;
    cf[prot] = schema.protected_groups[1 - group];
    pairs[i] = make_pair(model, pair_id(seed, i), i, std::move(x), std::move(cf));
  });
  return pairs;
}

std::vector<TestPair> pairs_from_dataset(const Classifier& model,
                                         const Dataset& ds, uint64_t seed) {
  const Schema& schema = ds.schema();
  const size_t prot = schema.protected_index();
  if (schema.protected_groups.size() < 2) {
    throw Error(ErrorCode::kUsage, "need two protected groups");
  }
  std::vector<TestPair> pairs;
  for (size_t r = 0; r < ds.size(); ++r) {
    const Instance& x = ds.rows()[r];
    const auto* s = string_value(x, prot);
    const auto group = s ? schema.group_of(*s) : std::nullopt;
    if (!group || *group > 1) continue;
    Instance cf = x;
    cf[prot] = schema.protected_groups[1 - *group];
    TestPair p = make_pair(model, "d-" + to_hex(mix_seed(seed, r)), r, x,
                           std::move(cf));
    p.label_positive = ds.label_positive(r);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

void validate_rules(const Schema& schema, std::span<const ProxyRule> rules) {
  const Column& prot = schema.column(schema.protected_column);
  for (const auto& rule : rules) {
    for (const auto* g : {&rule.trigger_from, &rule.trigger_to}) {
      if (!prot.code_of(*g)) {
        throw Error(ErrorCode::kConfig, "rule trigger '" + *g +
                                            "' is not a value of '" +
                                            schema.protected_column + "'");
      }
    }
    for (const auto& adj : rule.adjustments) {
      const auto index = schema.index_of(adj.column);
      if (!index) {
        throw Error(ErrorCode::kConfig,
                    "rule references unknown column '" + adj.column + "'");
      }
      if (adj.column == schema.protected_column ||
          adj.column == schema.label_column) {
        throw Error(ErrorCode::kConfig,
                    "rules may not adjust the protected or label column");
      }
      const Column& col = schema.columns[*index];
      if (!col.is_categorical()) {
        throw Error(ErrorCode::kConfig,
                    "rule column '" + adj.column + "' must be categorical");
      }
      for (const auto* v : {&adj.from, &adj.to}) {
        if (!col.code_of(*v)) {
          throw Error(ErrorCode::kConfig, "rule value '" + *v +
                                              "' is not a value of '" +
                                              adj.column + "'");
        }
      }
    }
  }
}

std::vector<ProxyRule> parse_rules(const json& j) {
  try {
    const json& list = j.is_object() ? j.at("rules") : j;
    if (!list.is_array()) {
      throw Error(ErrorCode::kConfig, "rules must be a JSON array");
    }
    std::vector<ProxyRule> rules;
    for (const auto& jr : list) {
      ProxyRule rule;
      rule.trigger_from = jr.at("trigger").at("from").get<std::string>();
      rule.trigger_to = jr.at("trigger").at("to").get<std::string>();
      for (const auto& ja : jr.at("adjustments")) {
        rule.adjustments.push_back({ja.at("column").get<std::string>(),
                                    ja.at("from").get<std::string>(),
                                    ja.at("to").get<std::string>()});
      }
      rules.push_back(std::move(rule));
    }
    return rules;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad rule file: ") + e.what());
  }
}

void to_json(json& j, const ProxyRule& rule) {
  json adjustments = json::array();
  for (const auto& a : rule.adjustments) {
    adjustments.push_back({{"column", a.column}, {"from", a.from}, {"to", a.to}});
  }
  j = {{"trigger", {{"from", rule.trigger_from}, {"to", rule.trigger_to}}},
       {"adjustments", std::move(adjustments)}};
}

std::string_view audit_label_name(AuditLabel label) {
  switch (label) {
    case AuditLabel::kTP:
      return "TP";
    case AuditLabel::kFP:
      return "FP";
    case AuditLabel::kTN:
      return "TN";
    case AuditLabel::kFN:
      return "FN";
  }
  return "?";
}

AuditLabel audit_label(bool raw_is_id, bool adjusted_is_id) {
  if (raw_is_id) return adjusted_is_id ? AuditLabel::kTP : AuditLabel::kFP;
  return adjusted_is_id ? AuditLabel::kFN : AuditLabel::kTN;
}

AuditResult audit(std::span<const TestPair> pairs,
                  std::span<const ProxyRule> rules, const Classifier& model,
                  const Schema& schema, size_t threads) {
  validate_rules(schema, rules);
  const size_t prot = schema.protected_index();
  AuditResult result;
  result.verdicts.resize(pairs.size());
  parallel_for(pairs.size(), threads == 0 ? default_thread_count() : threads,
               [&](size_t i) {
    const TestPair& pair = pairs[i];
    AuditVerdict& v = result.verdicts[i];
    v.pair_id = pair.id;
    v.raw_is_id = pair.is_id;
    v.adjusted_counterfactual = pair.counterfactual;
    const auto* from = string_value(pair.original, prot);
    const auto* to = string_value(pair.counterfactual, prot);
    for (const auto& rule : rules) {
      if (!from || !to || rule.trigger_from != *from || rule.trigger_to != *to) {
        continue;
      }
      for (const auto& adj : rule.adjustments) {
        const size_t c = schema.require_index(adj.column);
        const auto* current = string_value(pair.original, c);
        if (current && *current == adj.from) {
          v.adjusted_counterfactual[c] = adj.to;
          if (std::find(v.adjusted_columns.begin(), v.adjusted_columns.end(),
                        adj.column) == v.adjusted_columns.end()) {
            v.adjusted_columns.push_back(adj.column);
          }
        }
      }
    }
    v.proba_adjusted = model.predict_proba(v.adjusted_counterfactual);
    v.adjusted_is_id =
        is_discriminatory(categorize(pair.proba_original, v.proba_adjusted));
    v.label = audit_label(v.raw_is_id, v.adjusted_is_id);
  });
  AuditSummary& s = result.summary;
  s.pairs = pairs.size();
  for (const auto& v : result.verdicts) {
    switch (v.label) {
      case AuditLabel::kTP:
        ++s.tp;
        break;
      case AuditLabel::kFP:
        ++s.fp;
        break;
      case AuditLabel::kTN:
        ++s.tn;
        break;
      case AuditLabel::kFN:
        ++s.fn;
        break;
    }
  }
  if (s.pairs > 0) {
    const double n = static_cast<double>(s.pairs);
    s.tp_rate = s.tp / n;
    s.fp_rate = s.fp / n;
    s.tn_rate = s.tn / n;
    s.fn_rate = s.fn / n;
  }
  return result;
}

double gower_distance(const Schema& schema, const Instance& a,
                      const Instance& b) {
  const size_t label = schema.label_index();
  double total = 0.0;
  size_t columns = 0;
  for (size_t c = 0; c < schema.columns.size(); ++c) {
    if (c == label) continue;
    ++columns;
    const Column& col = schema.columns[c];
    if (col.is_categorical()) {
      total += a[c] == b[c] ? 0.0 : 1.0;
      continue;
    }
    const double* x = std::get_if<double>(&a[c]);
    const double* y = std::get_if<double>(&b[c]);
    if (!x || !y) {
      total += (x == nullptr) == (y == nullptr) ? 0.0 : 1.0;
      continue;
    }
    const double range = col.max() - col.min();
    if (range > 0) total += std::min(1.0, std::abs(*x - *y) / range);
  }
  return columns == 0 ? 0.0 : total / columns;
}

CounterfactualEdit edit_counterfactual(
    const TestPair& base, const std::map<std::string, std::string>& overrides,
    const Classifier& model, const Schema& schema) {
  CounterfactualEdit edit;
  edit.base_pair_id = base.id;
  edit.overrides = overrides;
  edit.instance = base.counterfactual;
  for (const auto& [column, value] : overrides) {
    const auto index = schema.index_of(column);
    if (!index) {
      throw Error(ErrorCode::kValidity, "unknown column '" + column + "'");
    }
    if (column == schema.label_column) {
      throw Error(ErrorCode::kValidity,
                  "column '" + column + "' is the label and cannot be edited");
    }
    const Column& col = schema.columns[*index];
    if (col.is_categorical()) {
      if (!col.code_of(value)) {
        throw Error(ErrorCode::kValidity, "column '" + column +
                                              "': value '" + value +
                                              "' is outside the observed domain");
      }
      edit.instance[*index] = value;
    } else {
      double v = 0.0;
      std::istringstream in(value);
      if (!(in >> v) || !(in >> std::ws).eof() || !std::isfinite(v)) {
        throw Error(ErrorCode::kValidity,
                    "column '" + column + "': '" + value + "' is not a number");
      }
      if (v < col.min() || v > col.max()) {
        throw Error(ErrorCode::kValidity,
                    "column '" + column + "': " + value + " outside [" +
                        format_number(col.min()) + ", " +
                        format_number(col.max()) + "]");
      }
      edit.instance[*index] = v;
    }
  }
  edit.proba_original = base.proba_original;
  edit.proba = model.predict_proba(edit.instance);
  edit.category = categorize(edit.proba_original, edit.proba);
  edit.is_id = is_discriminatory(edit.category);
  const size_t label = schema.label_index();
  for (size_t c = 0; c < schema.columns.size(); ++c) {
    if (c != label && !(edit.instance[c] == base.original[c])) {
      ++edit.changed_feature_count;
    }
  }
  edit.proximity = gower_distance(schema, base.original, edit.instance);
  return edit;
}

PairFilter PairFilter::parse(std::string_view spec) {
  PairFilter f;
  if (spec.empty() || spec == "all") return f;
  if (spec == "id" || spec == "id_only" || spec == "ID") {
    f.kind = Kind::kIdOnly;
    return f;
  }
  if (spec == "TP" || spec == "FP" || spec == "TN" || spec == "FN") {
    f.kind = Kind::kConfusion;
    f.confusion = std::string(spec);
    return f;
  }
  f.kind = Kind::kCategory;
  f.category = parse_category(spec);
  return f;
}

std::vector<TestPair> filter_pairs(std::span<const TestPair> pairs,
                                   const PairFilter& filter) {
  std::vector<TestPair> out;
  for (const auto& p : pairs) {
    bool keep = true;
    switch (filter.kind) {
      case PairFilter::Kind::kAll:
        break;
      case PairFilter::Kind::kIdOnly:
        keep = p.is_id;
        break;
      case PairFilter::Kind::kCategory:
        keep = p.category == filter.category;
        break;
      case PairFilter::Kind::kConfusion: {
        if (!p.label_positive) {
          throw Error(ErrorCode::kUsage,
                      "confusion filters need labeled pairs; '" + p.id +
                          "' has no ground truth");
        }
        const bool predicted = is_positive(p.proba_original);
        const bool actual = *p.label_positive;
        const char* cell = predicted ? (actual ? "TP" : "FP")
                                     : (actual ? "FN" : "TN");
        keep = filter.confusion == cell;
        break;
      }
    }
    if (keep) out.push_back(p);
  }
  return out;
}

json pair_to_json(const Schema& schema, const TestPair& pair) {
  json j = {{"id", pair.id},
            {"index", pair.index},
            {"original", instance_to_json(schema, pair.original)},
            {"counterfactual", instance_to_json(schema, pair.counterfactual)},
            {"proba_original", pair.proba_original},
            {"proba_counterfactual", pair.proba_counterfactual},
            {"category", category_name(pair.category)},
            {"is_id", pair.is_id}};
  j["label_positive"] =
      pair.label_positive ? json(*pair.label_positive) : json(nullptr);
  return j;
}

TestPair pair_from_json(const Schema& schema, const json& j) {
  try {
    TestPair p;
    p.id = j.at("id").get<std::string>();
    p.index = j.at("index").get<size_t>();
    p.original = instance_from_json(schema, j.at("original"));
    p.counterfactual = instance_from_json(schema, j.at("counterfactual"));
    p.proba_original = j.at("proba_original").get<double>();
    p.proba_counterfactual = j.at("proba_counterfactual").get<double>();
    p.category = parse_category(j.at("category").get<std::string>());
    p.is_id = j.at("is_id").get<bool>();
    if (!j.at("label_positive").is_null()) {
      p.label_positive = j.at("label_positive").get<bool>();
    }
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad test pair: ") + e.what());
  }
}

json verdict_to_json(const Schema& schema, const AuditVerdict& v) {
  return {{"pair_id", v.pair_id},
          {"raw_is_id", v.raw_is_id},
          {"adjusted_is_id", v.adjusted_is_id},
          {"label", audit_label_name(v.label)},
          {"proba_adjusted", v.proba_adjusted},
          {"adjusted_columns", v.adjusted_columns},
          {"adjusted_counterfactual",
           instance_to_json(schema, v.adjusted_counterfactual)}};
}

void to_json(json& j, const AuditSummary& s) {
  j = {{"pairs", s.pairs},
       {"counts", {{"TP", s.tp}, {"FP", s.fp}, {"TN", s.tn}, {"FN", s.fn}}},
       {"rates",
        {{"TP", s.tp_rate}, {"FP", s.fp_rate}, {"TN", s.tn_rate}, {"FN", s.fn_rate}}}};
}

json edit_to_json(const Schema& schema, const CounterfactualEdit& e) {
  return {{"base_pair_id", e.base_pair_id},
          {"overrides", e.overrides},
          {"instance", instance_to_json(schema, e.instance)},
          {"proba", e.proba},
          {"proba_original", e.proba_original},
          {"category", category_name(e.category)},
          {"is_id", e.is_id},
          {"changed_feature_count", e.changed_feature_count},
          {"proximity", e.proximity}};
}

std::string pairs_to_jsonl(const Schema& schema,
                           std::span<const TestPair> pairs) {
  std::string out;
  for (const auto& p : pairs) {
    out += pair_to_json(schema, p).dump();
    out.push_back('\n');
  }
  return out;
}

std::vector<TestPair> pairs_from_jsonl(const Schema& schema,
                                       std::string_view text) {
  std::vector<TestPair> pairs;
  size_t start = 0;
  while (start < text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    if (!line.empty()) {
      try {
        pairs.push_back(pair_from_json(schema, json::parse(line)));
      } catch (const json::parse_error& e) {
        throw Error(ErrorCode::kFormat, std::string("bad JSON line: ") + e.what());
      }
    }
    start = end + 1;
  }
  return pairs;
}

std::string summary_to_csv(const AuditSummary& s) {
  std::string out = "label,count,rate\n";
  const std::pair<const char*, std::pair<size_t, double>> rows[] = {
      {"TP", {s.tp, s.tp_rate}},
      {"FP", {s.fp, s.fp_rate}},
      {"TN", {s.tn, s.tn_rate}},
      {"FN", {s.fn, s.fn_rate}}};
  for (const auto& [label, v] : rows) {
    out += std::string(label) + "," + std::to_string(v.first) + "," +
           format_number(v.second) + "\n";
  }
  return out;
}

}  // namespace fairdebug
