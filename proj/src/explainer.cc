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

#include "fairdebug/explainer.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairdebug/error.h"
#include "fairdebug/util.h"

namespace fairdebug {

namespace {

using nlohmann::json;

constexpr double kRidgeLambda = 1.0;

struct RidgeFit {
  Eigen::VectorXd weights;
  double intercept = 0.0;
};

// Weighted ridge regression with an unpenalized intercept (handled by
// centering on the weighted means).
RidgeFit weighted_ridge(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                        const Eigen::VectorXd& pi) {
  const double total = pi.sum();
  const Eigen::RowVectorXd z_mean = (pi.transpose() * z) / total;
  const double y_mean = pi.dot(y) / total;
  const Eigen::MatrixXd zc = z.rowwise() - z_mean;
  const Eigen::VectorXd yc = y.array() - y_mean;
  Eigen::MatrixXd a = zc.transpose() * pi.asDiagonal() * zc;
  a.diagonal().array() += kRidgeLambda;
  const Eigen::VectorXd rhs = zc.transpose() * (pi.array() * yc.array()).matrix();
  RidgeFit fit;
  fit.weights = a.ldlt().solve(rhs);
  fit.intercept = y_mean - z_mean.dot(fit.weights);
  return fit;
}

double weighted_r2(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                   const Eigen::VectorXd& pi, const RidgeFit& fit) {
  const double y_mean = pi.dot(y) / pi.sum();
  const Eigen::VectorXd residual =
      y - ((z * fit.weights).array() + fit.intercept).matrix();
  const double ss_res = pi.dot(residual.cwiseAbs2());
  const double ss_tot = pi.dot((y.array() - y_mean).square().matrix());
  if (ss_tot <= 0.0) return 1.0;
  return 1.0 - ss_res / ss_tot;
}

bool by_magnitude(const FeatureWeight& a, const FeatureWeight& b) {
  const double x = std::abs(a.weight), y = std::abs(b.weight);
  if (x != y) return x > y;
  return a.name < b.name;
}

}  // namespace

Explanation explain(const Classifier& model, const Instance& x,
                    const Dataset& train, const ExplainOptions& options,
                    std::string instance_id) {
  const Schema& schema = train.schema();
  if (options.n_samples < std::max<size_t>(2, 10 * options.top_k)) {
    throw Error(ErrorCode::kUsage,
                "n_samples must be at least 10 * top_k (and at least 2)");
  }
  if (x.size() != schema.columns.size()) {
    throw Error(ErrorCode::kValidity,
                "instance has " + std::to_string(x.size()) +
                    " values, schema has " +
                    std::to_string(schema.columns.size()));
  }
  if (train.empty()) throw Error(ErrorCode::kSize, "training data is empty");

  const size_t label = schema.label_index();
  std::vector<size_t> features;
  for (size_t c = 0; c < schema.columns.size(); ++c) {
    if (c == label) continue;
    const Column& col = schema.columns[c];
    const Value& v = x[c];
    if (col.is_categorical() ? !std::holds_alternative<std::string>(v)
                             : !std::holds_alternative<double>(v)) {
      throw Error(ErrorCode::kValidity,
                  "column '" + col.name() + "' has a value of the wrong kind");
    }
    features.push_back(c);
  }
  const size_t d = features.size();
  const size_t n = options.n_samples;
  const size_t rows = train.size();

  std::vector<QuartileBinner> binners(d);
  for (size_t j = 0; j < d; ++j) {
    const size_t c = features[j];
    if (!schema.columns[c].is_numeric()) continue;
    std::vector<double> values;
    values.reserve(rows);
    for (const auto& row : train.rows()) values.push_back(std::get<double>(row[c]));
    binners[j] = QuartileBinner(schema.columns[c].name(), std::move(values));
  }
  auto same = [&](size_t j, const Value& v) {
    const size_t c = features[j];
    if (schema.columns[c].is_categorical()) return v == x[c];
    return binners[j].bin(std::get<double>(v)) ==
           binners[j].bin(std::get<double>(x[c]));
  };

  Eigen::MatrixXd z = Eigen::MatrixXd::Ones(n, d);
  Eigen::VectorXd y(n), pi(n);
  const double sigma = 0.75 * std::sqrt(static_cast<double>(d));
  std::vector<uint64_t> column_seeds(d);
  for (size_t j = 0; j < d; ++j) {
    column_seeds[j] =
        mix_seed(options.seed, fnv1a(schema.columns[features[j]].name()));
  }
  parallel_for(n, options.threads == 0 ? default_thread_count() : options.threads,
               [&](size_t s) {
    Instance sample = x;
    if (s > 0) {
      for (size_t j = 0; j < d; ++j) {
        std::mt19937_64 rng(mix_seed(column_seeds[j], s));
        if (std::bernoulli_distribution(0.5)(rng)) continue;
        const size_t r = std::uniform_int_distribution<size_t>(0, rows - 1)(rng);
        const size_t c = features[j];
        sample[c] = train.rows()[r][c];
        z(s, j) = same(j, sample[c]) ? 1.0 : 0.0;
      }
    }
    const double distance = static_cast<double>(d) - z.row(s).sum();
    pi[s] = sigma > 0 ? std::exp(-distance * distance / (sigma * sigma)) : 1.0;
    y[s] = model.predict_proba(sample);
  });

  bool varied = false;
  for (size_t s = 1; s < n && !varied; ++s) varied = z.row(s) != z.row(0);
  if (!varied) {
    throw Error(ErrorCode::kExplanation,
                "all perturbed samples are identical; nothing to explain");
  }

  Explanation e;
  e.instance_id = std::move(instance_id);
  e.proba = y[0];
  e.kernel_width = sigma;
  e.n_samples = n;
  e.seed = options.seed;
  e.top_k = options.top_k;
  const size_t k = std::min(options.top_k, d);

  auto describe = [&](size_t j, double weight) {
    const size_t c = features[j];
    const Column& col = schema.columns[c];
    FeatureWeight f;
    f.name = col.name();
    f.value = value_to_string(x[c]);
    f.condition = col.is_categorical()
                      ? col.name() + " = " + f.value
                      : binners[j].label(binners[j].bin(std::get<double>(x[c])));
    f.weight = weight;
    return f;
  };

  const bool constant =
      std::all_of(y.begin(), y.end(), [&](double v) { return v == y[0]; });
  if (constant) {
    std::vector<FeatureWeight> all;
    for (size_t j = 0; j < d; ++j) all.push_back(describe(j, 0.0));
    std::sort(all.begin(), all.end(), by_magnitude);
    all.resize(k);
    e.features = std::move(all);
    e.intercept = y[0];
    e.fidelity = 1.0;
    return e;
  }

  const RidgeFit full = weighted_ridge(z, y, pi);
  std::vector<FeatureWeight> ranked;
  std::vector<size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return by_magnitude(describe(a, full.weights[a]), describe(b, full.weights[b]));
  });
  order.resize(k);

  Eigen::MatrixXd zk(n, k);
  for (size_t i = 0; i < k; ++i) zk.col(i) = z.col(order[i]);
  const RidgeFit fit = weighted_ridge(zk, y, pi);
  for (size_t i = 0; i < k; ++i) e.features.push_back(describe(order[i], fit.weights[i]));
  std::sort(e.features.begin(), e.features.end(), by_magnitude);
  e.intercept = fit.intercept;
  e.fidelity = weighted_r2(zk, y, pi, fit);
  return e;
}

ExplanationStory explanation_story(const Explanation& e,
                                   const InteractionReport& report,
                                   const StoryConfig& config) {
  ExplanationStory story;
  std::vector<double> magnitudes;
  for (const auto& f : e.features) magnitudes.push_back(std::abs(f.weight));
  std::sort(magnitudes.begin(), magnitudes.end());
  const double cut = magnitudes.empty()
                         ? 0.0
                         : quantile_sorted(magnitudes, config.weight_percentile / 100.0);
  for (const auto& f : e.features) {
    AnnotatedFeature a;
    a.feature = f;
    a.is_protected = f.name == report.protected_column;
    if (const ColumnInteraction* ci = report.find(f.name)) {
      a.association = ci->association;
    }
    const double w = std::abs(f.weight);
    a.proxy_suspect = !a.is_protected && a.association && w > 0.0 && w >= cut &&
                      *a.association >= config.min_association;
    if (a.proxy_suspect) {
      story.sentences.push_back(
          "The model places a " +
          std::string(f.weight > 0 ? "positive" : "negative") + " weight of " +
          format_number(f.weight) + " on " + f.condition + ", and " + f.name +
          " is strongly associated with " + report.protected_column +
          " (association " + format_number(*a.association) + ").");
    }
    story.features.push_back(std::move(a));
  }
  return story;
}

void to_json(json& j, const Explanation& e) {
  json features = json::array();
  for (const auto& f : e.features) {
    features.push_back({{"name", f.name},
                        {"value", f.value},
                        {"condition", f.condition},
                        {"weight", f.weight}});
  }
  j = {{"instance_id", e.instance_id},
       {"proba", e.proba},
       {"features", std::move(features)},
       {"intercept", e.intercept},
       {"fidelity", e.fidelity},
       {"kernel_width", e.kernel_width},
       {"n_samples", e.n_samples},
       {"seed", e.seed},
       {"top_k", e.top_k}};
}

Explanation explanation_from_json(const json& j) {
  try {
    Explanation e;
    e.instance_id = j.at("instance_id").get<std::string>();
    e.proba = j.at("proba").get<double>();
    for (const auto& f : j.at("features")) {
      e.features.push_back({f.at("name").get<std::string>(),
                            f.at("value").get<std::string>(),
                            f.at("condition").get<std::string>(),
                            f.at("weight").get<double>()});
    }
    e.intercept = j.at("intercept").get<double>();
    e.fidelity = j.at("fidelity").get<double>();
    e.kernel_width = j.at("kernel_width").get<double>();
    e.n_samples = j.at("n_samples").get<size_t>();
    e.seed = j.at("seed").get<uint64_t>();
    e.top_k = j.at("top_k").get<size_t>();
    return e;
  } catch (const json::exception& ex) {
    throw Error(ErrorCode::kFormat, std::string("bad explanation: ") + ex.what());
  }
}

void to_json(json& j, const ExplanationStory& story) {
  json features = json::array();
  for (const auto& a : story.features) {
    features.push_back({{"name", a.feature.name},
                        {"condition", a.feature.condition},
                        {"weight", a.feature.weight},
                        {"association", a.association ? json(*a.association)
                                                      : json(nullptr)},
                        {"is_protected", a.is_protected},
                        {"proxy_suspect", a.proxy_suspect}});
  }
  j = {{"features", std::move(features)}, {"sentences", story.sentences}};
}

}  // namespace fairdebug
