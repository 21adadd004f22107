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

#ifndef FAIRDEBUG_COUNTERFACTUAL_H_
#define FAIRDEBUG_COUNTERFACTUAL_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairdebug/classifier.h"
#include "fairdebug/dataset.h"
#include "json.hpp"

namespace fairdebug {

enum class PairCategory {
  kBothPositive,
  kBothNegative,
  kOriginalFavored,        // original positive, counterfactual negative
  kCounterfactualFavored,  // original negative, counterfactual positive
};

std::string_view category_name(PairCategory category);
PairCategory parse_category(std::string_view name);

// Thresholded at 0.5 with ties positive.
PairCategory categorize(double p_original, double p_counterfactual);
inline bool is_discriminatory(PairCategory c) {
  return c == PairCategory::kOriginalFavored ||
         c == PairCategory::kCounterfactualFavored;
}

struct TestPair {
  std::string id;
  size_t index = 0;
  Instance original;
  Instance counterfactual;
  double proba_original = 0.0;
  double proba_counterfactual = 0.0;
  PairCategory category = PairCategory::kBothNegative;
  bool is_id = false;
  // Ground truth of the original when it came from labeled data.
  std::optional<bool> label_positive;

  bool operator==(const TestPair& other) const = default;
};

// Stable id from (seed, index).
std::string pair_id(uint64_t seed, size_t index);

// Random test inputs: every feature drawn independently and uniformly from its
// observed domain in `ds` (numeric: uniform over [min, max], rounded for
// integral columns), the protected value uniform over the two groups. The
// counterfactual flips the protected value. Requires exactly two groups.
std::vector<TestPair> generate(const Classifier& model, const Dataset& ds,
                               size_t n, uint64_t seed, size_t threads = 0);

// Counterfactual pairs for the labeled rows of `ds` whose protected value is
// one of the two groups. Ids use `seed` as namespace.
std::vector<TestPair> pairs_from_dataset(const Classifier& model,
                                         const Dataset& ds, uint64_t seed = 0);

// Stateless rescoring helper for a fixed counterfactual.
TestPair make_pair(const Classifier& model, std::string id, size_t index,
                   Instance original, Instance counterfactual);

struct Adjustment {
  std::string column;
  std::string from;
  std::string to;
};

// Applied when a pair flips the protected value from trigger_from to
// trigger_to; each adjustment fires when the original holds `from`.
struct ProxyRule {
  std::string trigger_from;
  std::string trigger_to;
  std::vector<Adjustment> adjustments;
};

// Throws Error(kConfig) for rules referencing unknown columns/values or
// touching the protected or label column.
void validate_rules(const Schema& schema, std::span<const ProxyRule> rules);
// Accepts {"rules": [...]} or a bare array.
std::vector<ProxyRule> parse_rules(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ProxyRule& rule);

enum class AuditLabel { kTP, kFP, kTN, kFN };
std::string_view audit_label_name(AuditLabel label);
AuditLabel audit_label(bool raw_is_id, bool adjusted_is_id);

struct AuditVerdict {
  std::string pair_id;
  bool raw_is_id = false;
  bool adjusted_is_id = false;
  AuditLabel label = AuditLabel::kTN;
  Instance adjusted_counterfactual;
  double proba_adjusted = 0.0;
  std::vector<std::string> adjusted_columns;
};

struct AuditSummary {
  size_t pairs = 0;
  size_t tp = 0, fp = 0, tn = 0, fn = 0;
  double tp_rate = 0, fp_rate = 0, tn_rate = 0, fn_rate = 0;
};

struct AuditResult {
  std::vector<AuditVerdict> verdicts;
  AuditSummary summary;
};

AuditResult audit(std::span<const TestPair> pairs,
                  std::span<const ProxyRule> rules, const Classifier& model,
                  const Schema& schema, size_t threads = 0);

struct CounterfactualEdit {
  std::string base_pair_id;
  std::map<std::string, std::string> overrides;
  Instance instance;
  double proba = 0.0;
  double proba_original = 0.0;
  PairCategory category = PairCategory::kBothNegative;
  bool is_id = false;
  size_t changed_feature_count = 0;
  double proximity = 0.0;  // mean Gower distance to the original
};

// Mean per-column Gower distance over feature columns (label excluded):
// categorical 0/1 mismatch, numeric |delta| / range.
double gower_distance(const Schema& schema, const Instance& a,
                      const Instance& b);

// Applies the protected flip plus `overrides` to base.original. Throws
// Error(kValidity) naming the column for out-of-domain values.
CounterfactualEdit edit_counterfactual(
    const TestPair& base, const std::map<std::string, std::string>& overrides,
    const Classifier& model, const Schema& schema);

struct PairFilter {
  enum class Kind { kAll, kIdOnly, kCategory, kConfusion };
  Kind kind = Kind::kAll;
  PairCategory category = PairCategory::kBothPositive;
  std::string confusion;  // "TP", "FP", "TN", "FN" of the original prediction

  static PairFilter parse(std::string_view spec);
};

// Stable-order subset. Confusion filters throw Error(kUsage) on unlabeled
// pairs.
std::vector<TestPair> filter_pairs(std::span<const TestPair> pairs,
                                   const PairFilter& filter);

nlohmann::json pair_to_json(const Schema& schema, const TestPair& pair);
TestPair pair_from_json(const Schema& schema, const nlohmann::json& j);
nlohmann::json verdict_to_json(const Schema& schema, const AuditVerdict& v);
void to_json(nlohmann::json& j, const AuditSummary& summary);
nlohmann::json edit_to_json(const Schema& schema, const CounterfactualEdit& e);

// One JSON object per line.
std::string pairs_to_jsonl(const Schema& schema, std::span<const TestPair> pairs);
std::vector<TestPair> pairs_from_jsonl(const Schema& schema,
                                       std::string_view text);
// label,count,rate rows.
std::string summary_to_csv(const AuditSummary& summary);

}  // namespace fairdebug

#endif  // FAIRDEBUG_COUNTERFACTUAL_H_
