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

#ifndef FAIRDEBUG_EXPLAINER_H_
#define FAIRDEBUG_EXPLAINER_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fairdebug/classifier.h"
#include "fairdebug/dataset.h"
#include "fairdebug/stats.h"
#include "json.hpp"

namespace fairdebug {

struct ExplainOptions {
  size_t top_k = 6;
  size_t n_samples = 1000;
  uint64_t seed = 0;
  size_t threads = 0;
};

struct FeatureWeight {
  std::string name;       // column name
  std::string value;      // the explained instance's value
  std::string condition;  // e.g. "relationship = Husband", "28 < age <= 37"
  double weight = 0.0;

  bool operator==(const FeatureWeight& other) const = default;
};

struct Explanation {
  std::string instance_id;
  double proba = 0.0;
  // Sorted by |weight| descending, ties by name.
  std::vector<FeatureWeight> features;
  double intercept = 0.0;
  double fidelity = 0.0;  // weighted R^2 on the perturbation sample
  double kernel_width = 0.0;
  size_t n_samples = 0;
  uint64_t seed = 0;
  size_t top_k = 0;

  bool operator==(const Explanation& other) const = default;
};

// Local surrogate around `x`. Every column except the label is a feature;
// numeric columns are quartile-binned on `train` for the interpretable
// representation. Each perturbed sample keeps a feature with probability 0.5
// and otherwise copies it from a random training row. Random draws are keyed
// by (seed, column name, sample index), so reordering columns only reorders
// the work. Sample 0 is `x` itself.
//
// Throws Error(kUsage) when n_samples < max(2, 10 * top_k), Error(kValidity)
// when `x` does not fit the schema and Error(kExplanation) when every
// perturbed sample has the same representation.
Explanation explain(const Classifier& model, const Instance& x,
                    const Dataset& train, const ExplainOptions& options,
                    std::string instance_id = "");

struct StoryConfig {
  double weight_percentile = 50.0;
  double min_association = 0.5;
};

struct AnnotatedFeature {
  FeatureWeight feature;
  std::optional<double> association;  // absent for the protected column
  bool is_protected = false;
  bool proxy_suspect = false;
};

struct ExplanationStory {
  std::vector<AnnotatedFeature> features;
  std::vector<std::string> sentences;
};

// A feature is a proxy suspect when |weight| is nonzero and at least the
// configured percentile of the explained |weights|, and its association with
// the protected attribute reaches min_association.
ExplanationStory explanation_story(const Explanation& e,
                                   const InteractionReport& report,
                                   const StoryConfig& config = {});

void to_json(nlohmann::json& j, const Explanation& e);
Explanation explanation_from_json(const nlohmann::json& j);
void to_json(nlohmann::json& j, const ExplanationStory& story);

}  // namespace fairdebug

#endif  // FAIRDEBUG_EXPLAINER_H_
