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

#ifndef FAIRDEBUG_LEARNERS_H_
#define FAIRDEBUG_LEARNERS_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "fairdebug/classifier.h"
#include "fairdebug/dataset.h"
#include "json.hpp"

namespace fairdebug {

enum class Algorithm { kLogReg, kLinSvm, kDecisionTree, kRandomForest };

// "logreg", "linsvm", "dtree", "rforest".
std::string_view algorithm_name(Algorithm algorithm);
Algorithm parse_algorithm(std::string_view name);
inline bool is_linear(Algorithm a) {
  return a == Algorithm::kLogReg || a == Algorithm::kLinSvm;
}

// Integer params are sampled and mutated on whole numbers.
enum class ParamKind { kReal, kInteger };

struct ParamSpec {
  std::string name;
  ParamKind kind = ParamKind::kReal;
  double lo = 0.0;
  double hi = 0.0;

  double range() const { return hi - lo; }
};

// Declared search space of each learner.
//   logreg  {lr [1e-4, 1], l2 [0, 1], epochs [10, 500]}
//   linsvm  {C [1e-3, 100], epochs [10, 500]}
//   dtree   {max_depth [1, 30], min_samples_split [2, 50]}
//   rforest {n_trees [5, 100], max_depth [1, 20], feature_frac [0.2, 1]}
const std::vector<ParamSpec>& param_space(Algorithm algorithm);

struct HyperParams {
  Algorithm algorithm = Algorithm::kDecisionTree;
  std::map<std::string, double> params;

  // Throws Error(kConfig) when the param is absent.
  double get(std::string_view name) const;
  // Every param of the space present and within its declared range.
  void validate_in_space() const;

  bool operator==(const HyperParams& other) const = default;
};

HyperParams default_hyperparams(Algorithm algorithm);

void to_json(nlohmann::json& j, const HyperParams& hp);
HyperParams hyperparams_from_json(const nlohmann::json& j);

// One input column as seen by a model. Categorical columns expand to a
// one-hot block of `categories.size()` slots in the linear feature vector;
// numeric columns take one slot, z-scored with (mean, scale) for linear
// learners and used raw by trees.
struct FeatureColumn {
  std::string name;
  size_t source = 0;  // column index in the schema / instance
  ColumnKind kind = ColumnKind::kCategorical;
  std::vector<std::string> categories;
  double mean = 0.0;
  double scale = 1.0;
  size_t offset = 0;  // first slot in the linear feature vector

  bool operator==(const FeatureColumn& other) const = default;
};

class FeatureLayout {
 public:
  FeatureLayout() = default;
  FeatureLayout(size_t schema_width, std::vector<FeatureColumn> columns);

  // Every column except the label; statistics from `train`.
  static FeatureLayout fit(const Dataset& train);

  size_t schema_width() const { return schema_width_; }
  size_t linear_width() const { return linear_width_; }
  const std::vector<FeatureColumn>& columns() const { return columns_; }

  // Code of `value` in column `feature`, -1 when unknown.
  int32_t code_of(size_t feature, std::string_view value) const;

  // Throws Error(kLayout) on arity mismatch.
  void check_arity(const Instance& x) const;
  // One-hot + standardized numeric slots; unknown categories leave their
  // block all-zero.
  void encode_linear(const Instance& x, std::span<double> out) const;
  // One slot per feature column: category code (-1 unknown) or raw value.
  void encode_raw(const Instance& x, std::span<double> out) const;

  // "sex=Male" for one-hot slots, the column name for numeric slots.
  std::string linear_feature_name(size_t slot) const;
  // Feature column owning a linear slot.
  size_t linear_slot_column(size_t slot) const;

  bool operator==(const FeatureLayout& other) const {
    return schema_width_ == other.schema_width_ && columns_ == other.columns_;
  }

 private:
  size_t schema_width_ = 0;
  size_t linear_width_ = 0;
  std::vector<FeatureColumn> columns_;
  std::vector<std::unordered_map<std::string, int32_t>> codes_;
};

void to_json(nlohmann::json& j, const FeatureLayout& layout);
FeatureLayout layout_from_json(const nlohmann::json& j);

struct TreeNode {
  int32_t feature = -1;  // layout column, -1 for leaves
  bool categorical = false;
  int32_t category = -1;   // categorical split: this code goes left
  double threshold = 0.0;  // numeric split: value <= threshold goes left
  int32_t left = -1;
  int32_t right = -1;
  double negatives = 0.0;  // training class counts reaching the node
  double positives = 0.0;

  bool is_leaf() const { return feature < 0; }
  double proba() const;
  bool operator==(const TreeNode& other) const = default;
};

// Node 0 is the root.
struct DecisionTree {
  std::vector<TreeNode> nodes;

  // Index of the leaf reached by a raw-encoded instance.
  size_t leaf_index(std::span<const double> raw) const;
  double predict_proba(std::span<const double> raw) const {
    return nodes[leaf_index(raw)].proba();
  }
  size_t depth() const;
  bool operator==(const DecisionTree& other) const = default;
};

struct TreeOptions {
  int max_depth = 5;
  int min_samples_split = 2;
  double feature_frac = 1.0;  // fraction of columns tried at each node
};

// CART with Gini impurity over raw-encoded rows (row-major, one slot per
// layout column). Categorical splits are one-vs-rest on a single code. Ties
// keep the first candidate in (column, code, threshold) order. `rng` is only
// used when feature_frac < 1.
DecisionTree fit_tree(const FeatureLayout& layout, std::span<const double> raw,
                      std::span<const uint8_t> labels,
                      std::span<const size_t> rows, const TreeOptions& options,
                      uint64_t seed);

struct LinearParams {
  std::vector<double> weights;  // one per linear slot
  double bias = 0.0;
  bool operator==(const LinearParams& other) const = default;
};

class TrainedModel final : public Classifier {
 public:
  static constexpr int kFormatVersion = 1;

  TrainedModel() = default;
  static TrainedModel linear(HyperParams hp, uint64_t seed, FeatureLayout layout,
                             LinearParams params);
  static TrainedModel forest(HyperParams hp, uint64_t seed, FeatureLayout layout,
                             std::vector<DecisionTree> trees);

  Algorithm algorithm() const { return hp_.algorithm; }
  const HyperParams& hyperparams() const { return hp_; }
  uint64_t seed() const { return seed_; }
  const FeatureLayout& layout() const { return layout_; }
  const LinearParams& linear_params() const { return linear_; }
  const std::vector<DecisionTree>& trees() const { return trees_; }

  double predict_proba(const Instance& x) const override;
  // w.x + b in standardized space; linear models only.
  double linear_score(const Instance& x) const;

  nlohmann::json to_json() const;
  static TrainedModel from_json(const nlohmann::json& j);
  // Canonical serialized form.
  std::string serialize() const;
  // Stable id derived from the serialized content.
  std::string content_id() const;

  bool operator==(const TrainedModel& other) const {
    return hp_ == other.hp_ && seed_ == other.seed_ &&
           layout_ == other.layout_ && linear_ == other.linear_ &&
           trees_ == other.trees_;
  }

 private:
  HyperParams hp_;
  uint64_t seed_ = 0;
  FeatureLayout layout_;
  LinearParams linear_;
  std::vector<DecisionTree> trees_;
};

// Fits a model. Deterministic in (train_set, hp, seed). Linear learners run
// full-batch (sub)gradient descent from zero weights; `epochs` = 0 therefore
// yields the all-zero model. Throws Error(kTraining) for a single-class
// training set or a non-finite loss.
TrainedModel train(const Dataset& train_set, const HyperParams& hp,
                   uint64_t seed);

struct LinearWeight {
  std::string feature;  // linear slot name, e.g. "relationship=Husband"
  std::string column;
  double weight = 0.0;       // normalized so that max |weight| = 1
  double raw_weight = 0.0;   // as fitted, in standardized space
};

struct LogicNode {
  int32_t id = 0;
  bool leaf = true;
  std::string column;
  std::string split;  // "equals" or "less_equal"
  std::string category;
  double threshold = 0.0;
  int32_t left = -1;
  int32_t right = -1;
  double negatives = 0.0;
  double positives = 0.0;
};

struct ModelLogic {
  Algorithm algorithm = Algorithm::kDecisionTree;
  std::vector<LinearWeight> weights;
  double bias = 0.0;
  std::vector<std::vector<LogicNode>> trees;
};

ModelLogic extract_logic(const TrainedModel& model);
void to_json(nlohmann::json& j, const ModelLogic& logic);

// Max relative error between the analytic gradient of the training objective
// and central finite differences (h = 1e-5), over `points` random parameter
// vectors. Linear learners only; at most 50 rows.
double grad_check(const HyperParams& hp, const Dataset& tiny_set,
                  uint64_t seed = 0, int points = 20);

}  // namespace fairdebug

#endif  // FAIRDEBUG_LEARNERS_H_
