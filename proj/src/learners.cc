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

#include "fairdebug/learners.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairdebug/error.h"
#include "fairdebug/hash.h"
#include "fairdebug/linear_objective.h"
#include "fairdebug/util.h"

namespace fairdebug {

namespace {

using nlohmann::json;

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

std::vector<uint8_t> binary_labels(const Dataset& ds) {
  std::vector<uint8_t> y(ds.size());
  for (size_t r = 0; r < ds.size(); ++r) y[r] = ds.label_positive(r) ? 1 : 0;
  return y;
}

std::vector<double> encode_raw_matrix(const FeatureLayout& layout,
                                      const Dataset& ds) {
  const size_t width = layout.columns().size();
  std::vector<double> raw(ds.size() * width);
  for (size_t r = 0; r < ds.size(); ++r) {
    layout.encode_raw(ds.rows()[r],
                      std::span<double>(raw).subspan(r * width, width));
  }
  return raw;
}

int as_int(double v) { return static_cast<int>(std::llround(v)); }

LinearParams fit_linear(const HyperParams& hp, const FeatureLayout& layout,
                        const Dataset& train_set) {
  const LinearObjective objective =
      LinearObjective::for_hyperparams(hp, layout, train_set);
  const int epochs = as_int(hp.get("epochs"));
  const bool logistic = hp.algorithm == Algorithm::kLogReg;
  const double lr = logistic ? hp.get("lr") : 0.0;
  Eigen::VectorXd params = Eigen::VectorXd::Zero(objective.dimension());
  for (int t = 1; t <= epochs; ++t) {
    // Subgradient steps decay as 1/sqrt(t); log-loss uses the fixed rate.
    const double step = logistic ? lr : 1.0 / std::sqrt(static_cast<double>(t));
    params -= step * objective.gradient(params);
    if (!std::isfinite(objective.value(params)) || !params.allFinite()) {
      throw Error(ErrorCode::kTraining,
                  std::string("loss diverged at epoch ") + std::to_string(t) +
                      "; reduce '" + (logistic ? "lr" : "C") + "'");
    }
  }
  LinearParams out;
  out.weights.assign(params.data(), params.data() + params.size() - 1);
  out.bias = params(params.size() - 1);
  return out;
}

json tree_to_json(const DecisionTree& tree) {
  json nodes = json::array();
  for (const auto& n : tree.nodes) {
    // [feature, categorical, category, threshold, left, right, neg, pos]
    nodes.push_back(json::array({n.feature, n.categorical, n.category,
                                 n.threshold, n.left, n.right, n.negatives,
                                 n.positives}));
  }
  return nodes;
}

DecisionTree tree_from_json(const json& j, size_t n_features) {
  DecisionTree tree;
  for (const auto& jn : j) {
    TreeNode n;
    n.feature = jn.at(0).get<int32_t>();
    n.categorical = jn.at(1).get<bool>();
    n.category = jn.at(2).get<int32_t>();
    n.threshold = jn.at(3).get<double>();
    n.left = jn.at(4).get<int32_t>();
    n.right = jn.at(5).get<int32_t>();
    n.negatives = jn.at(6).get<double>();
    n.positives = jn.at(7).get<double>();
    tree.nodes.push_back(n);
  }
  const auto n_nodes = static_cast<int32_t>(tree.nodes.size());
  if (n_nodes == 0) throw Error(ErrorCode::kFormat, "empty tree");
  for (const auto& n : tree.nodes) {
    if (n.is_leaf()) continue;
    if (n.feature >= static_cast<int32_t>(n_features) || n.left <= 0 ||
        n.right <= 0 || n.left >= n_nodes || n.right >= n_nodes) {
      throw Error(ErrorCode::kFormat, "tree node references out of range");
    }
  }
  return tree;
}

}  // namespace

std::string_view algorithm_name(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kLogReg:
      return "logreg";
    case Algorithm::kLinSvm:
      return "linsvm";
    case Algorithm::kDecisionTree:
      return "dtree";
    case Algorithm::kRandomForest:
      return "rforest";
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kLogReg, Algorithm::kLinSvm,
                      Algorithm::kDecisionTree, Algorithm::kRandomForest}) {
    if (algorithm_name(a) == name) return a;
  }
  throw Error(ErrorCode::kConfig,
              "unknown algorithm '" + std::string(name) +
                  "' (expected logreg, linsvm, dtree or rforest)");
}

const std::vector<ParamSpec>& param_space(Algorithm algorithm) {
  static const std::vector<ParamSpec> kLogReg = {
      {"lr", ParamKind::kReal, 1e-4, 1.0},
      {"l2", ParamKind::kReal, 0.0, 1.0},
      {"epochs", ParamKind::kInteger, 10, 500}};
  static const std::vector<ParamSpec> kLinSvm = {
      {"C", ParamKind::kReal, 1e-3, 100.0},
      {"epochs", ParamKind::kInteger, 10, 500}};
  static const std::vector<ParamSpec> kTree = {
      {"max_depth", ParamKind::kInteger, 1, 30},
      {"min_samples_split", ParamKind::kInteger, 2, 50}};
  static const std::vector<ParamSpec> kForest = {
      {"n_trees", ParamKind::kInteger, 5, 100},
      {"max_depth", ParamKind::kInteger, 1, 20},
      {"feature_frac", ParamKind::kReal, 0.2, 1.0}};
  switch (algorithm) {
    case Algorithm::kLogReg:
      return kLogReg;
    case Algorithm::kLinSvm:
      return kLinSvm;
    case Algorithm::kDecisionTree:
      return kTree;
    case Algorithm::kRandomForest:
      return kForest;
  }
  return kTree;
}

double HyperParams::get(std::string_view name) const {
  const auto it = params.find(std::string(name));
  if (it == params.end()) {
    throw Error(ErrorCode::kConfig, "missing hyperparameter '" +
                                        std::string(name) + "' for " +
                                        std::string(algorithm_name(algorithm)));
  }
  return it->second;
}

void HyperParams::validate_in_space() const {
  const auto& space = param_space(algorithm);
  for (const auto& spec : space) {
    const double v = get(spec.name);
    if (!(v >= spec.lo && v <= spec.hi)) {
      throw Error(ErrorCode::kConfig,
                  "hyperparameter '" + spec.name + "' = " + format_number(v) +
                      " outside [" + format_number(spec.lo) + ", " +
                      format_number(spec.hi) + "]");
    }
    if (spec.kind == ParamKind::kInteger && std::floor(v) != v) {
      throw Error(ErrorCode::kConfig,
                  "hyperparameter '" + spec.name + "' must be an integer");
    }
  }
  if (params.size() != space.size()) {
    throw Error(ErrorCode::kConfig, "unexpected hyperparameters for " +
                                        std::string(algorithm_name(algorithm)));
  }
}

HyperParams default_hyperparams(Algorithm algorithm) {
  HyperParams hp;
  hp.algorithm = algorithm;
  switch (algorithm) {
    case Algorithm::kLogReg:
      hp.params = {{"lr", 0.1}, {"l2", 0.0}, {"epochs", 200}};
      break;
    case Algorithm::kLinSvm:
      hp.params = {{"C", 1.0}, {"epochs", 200}};
      break;
    case Algorithm::kDecisionTree:
      hp.params = {{"max_depth", 5}, {"min_samples_split", 2}};
      break;
    case Algorithm::kRandomForest:
      hp.params = {{"n_trees", 20}, {"max_depth", 8}, {"feature_frac", 0.5}};
      break;
  }
  return hp;
}

void to_json(json& j, const HyperParams& hp) {
  j = {{"algorithm", algorithm_name(hp.algorithm)}, {"params", hp.params}};
}

HyperParams hyperparams_from_json(const json& j) {
  try {
    HyperParams hp;
    hp.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    hp.params = j.at("params").get<std::map<std::string, double>>();
    return hp;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat,
                std::string("bad hyperparameter JSON: ") + e.what());
  }
}

FeatureLayout::FeatureLayout(size_t schema_width,
                             std::vector<FeatureColumn> columns)
    : schema_width_(schema_width), columns_(std::move(columns)) {
  linear_width_ = 0;
  for (auto& c : columns_) {
    c.offset = linear_width_;
    linear_width_ += c.kind == ColumnKind::kCategorical ? c.categories.size() : 1;
    auto& codes = codes_.emplace_back();
    for (size_t k = 0; k < c.categories.size(); ++k) {
      codes.emplace(c.categories[k], static_cast<int32_t>(k));
    }
  }
}

FeatureLayout FeatureLayout::fit(const Dataset& train) {
  const Schema& schema = train.schema();
  const size_t label = schema.label_index();
  std::vector<FeatureColumn> columns;
  for (size_t i = 0; i < schema.columns.size(); ++i) {
    if (i == label) continue;
    const Column& col = schema.columns[i];
    FeatureColumn fc;
    fc.name = col.name();
    fc.source = i;
    fc.kind = col.kind();
    if (col.is_categorical()) {
      fc.categories = col.categories();
    } else {
      double sum = 0, sq = 0;
      for (const auto& row : train.rows()) {
        const double v = std::get<double>(row[i]);
        sum += v;
        sq += v * v;
      }
      const double n = std::max<size_t>(1, train.size());
      fc.mean = sum / n;
      const double var = std::max(0.0, sq / n - fc.mean * fc.mean);
      fc.scale = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
    columns.push_back(std::move(fc));
  }
  return FeatureLayout(schema.columns.size(), std::move(columns));
}

int32_t FeatureLayout::code_of(size_t feature, std::string_view value) const {
  const auto& codes = codes_[feature];
  const auto it = codes.find(std::string(value));
  return it == codes.end() ? -1 : it->second;
}

void FeatureLayout::check_arity(const Instance& x) const {
  if (x.size() != schema_width_) {
    throw Error(ErrorCode::kLayout,
                "instance has " + std::to_string(x.size()) +
                    " values, model expects " + std::to_string(schema_width_));
  }
}

void FeatureLayout::encode_linear(const Instance& x,
                                  std::span<double> out) const {
  check_arity(x);
  std::fill(out.begin(), out.end(), 0.0);
  for (size_t f = 0; f < columns_.size(); ++f) {
    const FeatureColumn& c = columns_[f];
    const Value& v = x[c.source];
    if (c.kind == ColumnKind::kCategorical) {
      if (const auto* s = std::get_if<std::string>(&v)) {
        const int32_t code = code_of(f, *s);
        if (code >= 0) out[c.offset + code] = 1.0;
      }
    } else if (const auto* d = std::get_if<double>(&v)) {
      out[c.offset] = (*d - c.mean) / c.scale;
    } else {
      throw Error(ErrorCode::kLayout,
                  "numeric column '" + c.name + "' has no value");
    }
  }
}

void FeatureLayout::encode_raw(const Instance& x, std::span<double> out) const {
  check_arity(x);
  for (size_t f = 0; f < columns_.size(); ++f) {
    const FeatureColumn& c = columns_[f];
    const Value& v = x[c.source];
    if (c.kind == ColumnKind::kCategorical) {
      const auto* s = std::get_if<std::string>(&v);
      out[f] = s ? code_of(f, *s) : -1;
    } else if (const auto* d = std::get_if<double>(&v)) {
      out[f] = *d;
    } else {
      throw Error(ErrorCode::kLayout,
                  "numeric column '" + c.name + "' has no value");
    }
  }
}

size_t FeatureLayout::linear_slot_column(size_t slot) const {
  for (size_t f = columns_.size(); f-- > 0;) {
    if (columns_[f].offset <= slot) return f;
  }
  return 0;
}

std::string FeatureLayout::linear_feature_name(size_t slot) const {
  const FeatureColumn& c = columns_[linear_slot_column(slot)];
  if (c.kind == ColumnKind::kNumeric) return c.name;
  return c.name + "=" + c.categories[slot - c.offset];
}

void to_json(json& j, const FeatureLayout& layout) {
  json columns = json::array();
  for (const auto& c : layout.columns()) {
    json jc = {{"name", c.name},
               {"source", c.source},
               {"kind", column_kind_name(c.kind)}};
    if (c.kind == ColumnKind::kCategorical) {
      jc["categories"] = c.categories;
    } else {
      jc["mean"] = c.mean;
      jc["scale"] = c.scale;
    }
    columns.push_back(std::move(jc));
  }
  j = {{"schema_width", layout.schema_width()}, {"columns", std::move(columns)}};
}

FeatureLayout layout_from_json(const json& j) {
  std::vector<FeatureColumn> columns;
  for (const auto& jc : j.at("columns")) {
    FeatureColumn c;
    c.name = jc.at("name").get<std::string>();
    c.source = jc.at("source").get<size_t>();
    c.kind = parse_column_kind(jc.at("kind").get<std::string>());
    if (c.kind == ColumnKind::kCategorical) {
      c.categories = jc.at("categories").get<std::vector<std::string>>();
    } else {
      c.mean = jc.at("mean").get<double>();
      c.scale = jc.at("scale").get<double>();
    }
    columns.push_back(std::move(c));
  }
  return FeatureLayout(j.at("schema_width").get<size_t>(), std::move(columns));
}

TrainedModel TrainedModel::linear(HyperParams hp, uint64_t seed,
                                  FeatureLayout layout, LinearParams params) {
  if (params.weights.size() != layout.linear_width()) {
    throw Error(ErrorCode::kLayout, "weight vector does not match layout");
  }
  TrainedModel m;
  m.hp_ = std::move(hp);
  m.seed_ = seed;
  m.layout_ = std::move(layout);
  m.linear_ = std::move(params);
  return m;
}

TrainedModel TrainedModel::forest(HyperParams hp, uint64_t seed,
                                  FeatureLayout layout,
                                  std::vector<DecisionTree> trees) {
  if (trees.empty()) throw Error(ErrorCode::kTraining, "no trees");
  TrainedModel m;
  m.hp_ = std::move(hp);
  m.seed_ = seed;
  m.layout_ = std::move(layout);
  m.trees_ = std::move(trees);
  return m;
}

double TrainedModel::linear_score(const Instance& x) const {
  std::vector<double> features(layout_.linear_width());
  layout_.encode_linear(x, features);
  double s = linear_.bias;
  for (size_t i = 0; i < features.size(); ++i) s += linear_.weights[i] * features[i];
  return s;
}

double TrainedModel::predict_proba(const Instance& x) const {
  if (is_linear(hp_.algorithm)) return sigmoid(linear_score(x));
  std::vector<double> raw(layout_.columns().size());
  layout_.encode_raw(x, raw);
  double sum = 0.0;
  for (const auto& tree : trees_) sum += tree.predict_proba(raw);
  return sum / static_cast<double>(trees_.size());
}

json TrainedModel::to_json() const {
  json j = {{"format_version", kFormatVersion},
            {"algorithm", algorithm_name(hp_.algorithm)},
            {"hyperparams", hp_},
            {"seed", seed_},
            {"layout", layout_}};
  if (is_linear(hp_.algorithm)) {
    j["weights"] = linear_.weights;
    j["bias"] = linear_.bias;
  } else {
    json trees = json::array();
    for (const auto& t : trees_) trees.push_back(tree_to_json(t));
    j["trees"] = std::move(trees);
  }
  return j;
}

TrainedModel TrainedModel::from_json(const json& j) {
  try {
    if (j.at("format_version").get<int>() != kFormatVersion) {
      throw Error(ErrorCode::kFormat, "unsupported model format version");
    }
    HyperParams hp = hyperparams_from_json(j.at("hyperparams"));
    const uint64_t seed = j.at("seed").get<uint64_t>();
    FeatureLayout layout = layout_from_json(j.at("layout"));
    if (is_linear(hp.algorithm)) {
      LinearParams p;
      p.weights = j.at("weights").get<std::vector<double>>();
      p.bias = j.at("bias").get<double>();
      return linear(std::move(hp), seed, std::move(layout), std::move(p));
    }
    std::vector<DecisionTree> trees;
    for (const auto& jt : j.at("trees")) {
      trees.push_back(tree_from_json(jt, layout.columns().size()));
    }
    return forest(std::move(hp), seed, std::move(layout), std::move(trees));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad model JSON: ") + e.what());
  }
}

std::string TrainedModel::serialize() const { return to_json().dump(); }

std::string TrainedModel::content_id() const {
  return "m-" + sha256_hex(serialize()).substr(0, 16);
}

TrainedModel train(const Dataset& train_set, const HyperParams& hp,
                   uint64_t seed) {
  if (train_set.empty()) {
    throw Error(ErrorCode::kTraining, "training set is empty");
  }
  const std::vector<uint8_t> labels = binary_labels(train_set);
  const size_t positives = std::count(labels.begin(), labels.end(), 1);
  if (positives == 0 || positives == labels.size()) {
    throw Error(ErrorCode::kTraining,
                "training set contains a single label class");
  }
  FeatureLayout layout = FeatureLayout::fit(train_set);

  switch (hp.algorithm) {
    case Algorithm::kLogReg:
    case Algorithm::kLinSvm: {
      if (hp.get("epochs") < 0) {
        throw Error(ErrorCode::kConfig, "'epochs' must be non-negative");
      }
      LinearParams params = fit_linear(hp, layout, train_set);
      return TrainedModel::linear(hp, seed, std::move(layout), std::move(params));
    }
    case Algorithm::kDecisionTree: {
      TreeOptions options;
      options.max_depth = as_int(hp.get("max_depth"));
      options.min_samples_split = as_int(hp.get("min_samples_split"));
      if (options.max_depth < 0) {
        throw Error(ErrorCode::kConfig, "'max_depth' must be non-negative");
      }
      const std::vector<double> raw = encode_raw_matrix(layout, train_set);
      std::vector<size_t> rows(train_set.size());
      std::iota(rows.begin(), rows.end(), 0);
      std::vector<DecisionTree> trees;
      trees.push_back(fit_tree(layout, raw, labels, rows, options, seed));
      return TrainedModel::forest(hp, seed, std::move(layout), std::move(trees));
    }
    case Algorithm::kRandomForest: {
      TreeOptions options;
      options.max_depth = as_int(hp.get("max_depth"));
      options.min_samples_split = 2;
      options.feature_frac = hp.get("feature_frac");
      const int n_trees = as_int(hp.get("n_trees"));
      if (n_trees < 1 || options.feature_frac <= 0 || options.feature_frac > 1) {
        throw Error(ErrorCode::kConfig, "bad forest hyperparameters");
      }
      const std::vector<double> raw = encode_raw_matrix(layout, train_set);
      std::vector<DecisionTree> trees;
      for (int t = 0; t < n_trees; ++t) {
        const uint64_t tree_seed = mix_seed(seed, t);
        std::mt19937_64 rng(tree_seed);
        std::uniform_int_distribution<size_t> draw(0, train_set.size() - 1);
        std::vector<size_t> bootstrap(train_set.size());
        for (auto& r : bootstrap) r = draw(rng);
        trees.push_back(
            fit_tree(layout, raw, labels, bootstrap, options, rng()));
      }
      return TrainedModel::forest(hp, seed, std::move(layout), std::move(trees));
    }
  }
  throw Error(ErrorCode::kConfig, "unknown algorithm");
}

ModelLogic extract_logic(const TrainedModel& model) {
  ModelLogic logic;
  logic.algorithm = model.algorithm();
  const FeatureLayout& layout = model.layout();
  if (is_linear(model.algorithm())) {
    const auto& w = model.linear_params().weights;
    double max_abs = 0.0;
    for (double v : w) max_abs = std::max(max_abs, std::abs(v));
    for (size_t i = 0; i < w.size(); ++i) {
      LinearWeight lw;
      lw.feature = layout.linear_feature_name(i);
      lw.column = layout.columns()[layout.linear_slot_column(i)].name;
      lw.raw_weight = w[i];
      lw.weight = max_abs > 0.0 ? w[i] / max_abs : 0.0;
      logic.weights.push_back(std::move(lw));
    }
    logic.bias = model.linear_params().bias;
    return logic;
  }
  for (const auto& tree : model.trees()) {
    std::vector<LogicNode> nodes;
    for (size_t i = 0; i < tree.nodes.size(); ++i) {
      const TreeNode& n = tree.nodes[i];
      LogicNode ln;
      ln.id = static_cast<int32_t>(i);
      ln.leaf = n.is_leaf();
      ln.negatives = n.negatives;
      ln.positives = n.positives;
      if (!n.is_leaf()) {
        const FeatureColumn& c = layout.columns()[n.feature];
        ln.column = c.name;
        ln.left = n.left;
        ln.right = n.right;
        if (n.categorical) {
          ln.split = "equals";
          ln.category = c.categories[n.category];
        } else {
          ln.split = "less_equal";
          ln.threshold = n.threshold;
        }
      }
      nodes.push_back(std::move(ln));
    }
    logic.trees.push_back(std::move(nodes));
  }
  return logic;
}

void to_json(json& j, const ModelLogic& logic) {
  j = {{"algorithm", algorithm_name(logic.algorithm)}};
  if (is_linear(logic.algorithm)) {
    json weights = json::array();
    for (const auto& w : logic.weights) {
      weights.push_back({{"feature", w.feature},
                         {"column", w.column},
                         {"weight", w.weight},
                         {"raw_weight", w.raw_weight}});
    }
    j["weights"] = std::move(weights);
    j["bias"] = logic.bias;
    j["weight_space"] =
        "standardized: numeric features are z-scored with training mean and "
        "std; categorical features are one-hot indicators. Weights are divided "
        "by the largest absolute weight.";
    return;
  }
  json trees = json::array();
  for (const auto& tree : logic.trees) {
    json nodes = json::array();
    for (const auto& n : tree) {
      json jn = {{"id", n.id},
                 {"leaf", n.leaf},
                 {"negatives", n.negatives},
                 {"positives", n.positives}};
      if (!n.leaf) {
        jn["column"] = n.column;
        jn["split"] = n.split;
        jn["left"] = n.left;
        jn["right"] = n.right;
        if (n.split == "equals") {
          jn["category"] = n.category;
        } else {
          jn["threshold"] = n.threshold;
        }
      }
      nodes.push_back(std::move(jn));
    }
    trees.push_back(std::move(nodes));
  }
  j["trees"] = std::move(trees);
}

double grad_check(const HyperParams& hp, const Dataset& tiny_set, uint64_t seed,
                  int points) {
  if (!is_linear(hp.algorithm)) {
    throw Error(ErrorCode::kUsage, "grad_check supports logreg and linsvm only");
  }
  if (tiny_set.size() > 50) {
    throw Error(ErrorCode::kSize, "grad_check takes at most 50 rows");
  }
  const FeatureLayout layout = FeatureLayout::fit(tiny_set);
  const LinearObjective objective =
      LinearObjective::for_hyperparams(hp, layout, tiny_set);
  constexpr double kStep = 1e-5;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-1.0, 1.0);
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    Eigen::VectorXd params(objective.dimension());
    // Finite differences are meaningless across the hinge kink; redraw points
    // that sit too close to it.
    do {
      for (Eigen::Index i = 0; i < params.size(); ++i) params(i) = coord(rng);
    } while (objective.loss() == LinearObjective::Loss::kHinge &&
             objective.kink_distance(params) < 1e-3);
    const Eigen::VectorXd analytic = objective.gradient(params);
    for (Eigen::Index i = 0; i < params.size(); ++i) {
      Eigen::VectorXd up = params, down = params;
      up(i) += kStep;
      down(i) -= kStep;
      const double numeric =
          (objective.value(up) - objective.value(down)) / (2 * kStep);
      const double denom =
          std::max({std::abs(analytic(i)), std::abs(numeric), 1e-6});
      worst = std::max(worst, std::abs(analytic(i) - numeric) / denom);
    }
  }
  return worst;
}

}  // namespace fairdebug
