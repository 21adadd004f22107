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

#ifndef FAIRDEBUG_FAIRNESS_H_
#define FAIRDEBUG_FAIRNESS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairdebug/classifier.h"
#include "fairdebug/dataset.h"
#include "json.hpp"

namespace fairdebug {

struct GroupConfusion {
  std::string group;
  size_t tp = 0, fp = 0, tn = 0, fn = 0;

  size_t size() const { return tp + fp + tn + fn; }
  // 0 when the group has no actual positives (flagged via tpr_degenerate).
  double tpr() const;
  // 0 when the group has no actual negatives (flagged via fpr_degenerate).
  double fpr() const;
  bool tpr_degenerate() const { return tp + fn == 0; }
  bool fpr_degenerate() const { return fp + tn == 0; }

  bool operator==(const GroupConfusion& other) const = default;
};

// EOD = TPR_0 - TPR_1, AOD = ((TPR_0 - TPR_1) + (FPR_0 - FPR_1)) / 2, with
// group 0 the reference group. Signed; the search minimizes |.|. Only the first
// two groups enter EOD/AOD, further groups are reported descriptively.
struct FairnessReport {
  std::string model_id;
  std::string split_id;
  size_t evaluated = 0;  // all rows, including those outside the groups
  double accuracy = 0.0;
  double eod = 0.0;
  double aod = 0.0;
  std::vector<GroupConfusion> groups;

  bool degenerate() const;
  bool operator==(const FairnessReport& other) const = default;
};

// One evaluated row. `group` is nullopt for rows outside the protected groups.
struct Outcome {
  std::optional<size_t> group;
  bool label = false;
  bool predicted = false;
};

// Throws Error(kMetric) naming the group when one of the first two groups is
// empty.
FairnessReport compute_report(std::span<const Outcome> outcomes,
                              std::span<const std::string> group_names);

FairnessReport evaluate(const Classifier& model, const Dataset& ds,
                        std::string model_id = "", std::string split_id = "");

void to_json(nlohmann::json& j, const FairnessReport& report);
FairnessReport fairness_report_from_json(const nlohmann::json& j);

}  // namespace fairdebug

#endif  // FAIRDEBUG_FAIRNESS_H_
