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

#include "fairdebug/linear_objective.h"

#include <cmath>
#include <limits>

namespace fairdebug {

namespace {

// log(1 + exp(z)) without overflow.
double softplus(double z) {
  return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

}  // namespace

Eigen::MatrixXd encode_linear_matrix(const FeatureLayout& layout,
                                     const Dataset& data) {
  Eigen::MatrixXd x(data.size(), layout.linear_width());
  std::vector<double> row(layout.linear_width());
  for (size_t r = 0; r < data.size(); ++r) {
    layout.encode_linear(data.rows()[r], row);
    for (size_t c = 0; c < row.size(); ++c) x(r, c) = row[c];
  }
  return x;
}

LinearObjective::LinearObjective(Loss loss, Eigen::MatrixXd features,
                                 Eigen::VectorXd labels, double regularization)
    : loss_(loss),
      features_(std::move(features)),
      labels_(std::move(labels)),
      regularization_(regularization) {}

LinearObjective LinearObjective::for_hyperparams(const HyperParams& hp,
                                                 const FeatureLayout& layout,
                                                 const Dataset& data) {
  Eigen::VectorXd y(data.size());
  for (size_t r = 0; r < data.size(); ++r) y(r) = data.label_positive(r) ? 1 : 0;
  Eigen::MatrixXd x = encode_linear_matrix(layout, data);
  if (hp.algorithm == Algorithm::kLogReg) {
    return LinearObjective(Loss::kLogistic, std::move(x), std::move(y),
                           hp.get("l2"));
  }
  const double n = static_cast<double>(std::max<size_t>(1, data.size()));
  return LinearObjective(Loss::kHinge, std::move(x), std::move(y),
                         1.0 / (2.0 * hp.get("C") * n));
}

Eigen::VectorXd LinearObjective::scores(const Eigen::VectorXd& params) const {
  const Eigen::Index d = features_.cols();
  return (features_ * params.head(d)).array() + params(d);
}

double LinearObjective::value(const Eigen::VectorXd& params) const {
  const Eigen::Index d = features_.cols();
  const Eigen::VectorXd s = scores(params);
  const double n = static_cast<double>(features_.rows());
  double total = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double sign = labels_(i) > 0.5 ? 1.0 : -1.0;
    total += loss_ == Loss::kLogistic ? softplus(-sign * s(i))
                                      : std::max(0.0, 1.0 - sign * s(i));
  }
  return total / n + regularization_ * params.head(d).squaredNorm();
}

Eigen::VectorXd LinearObjective::gradient(const Eigen::VectorXd& params) const {
  const Eigen::Index d = features_.cols();
  const Eigen::VectorXd s = scores(params);
  const double n = static_cast<double>(features_.rows());
  // dloss/dscore per row.
  Eigen::VectorXd residual(s.size());
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (loss_ == Loss::kLogistic) {
      residual(i) = sigmoid(s(i)) - labels_(i);
    } else {
      const double sign = labels_(i) > 0.5 ? 1.0 : -1.0;
      residual(i) = sign * s(i) < 1.0 ? -sign : 0.0;
    }
  }
  Eigen::VectorXd grad(d + 1);
  grad.head(d) = features_.transpose() * residual / n +
                 2.0 * regularization_ * params.head(d);
  grad(d) = residual.sum() / n;
  return grad;
}

double LinearObjective::kink_distance(const Eigen::VectorXd& params) const {
  const Eigen::VectorXd s = scores(params);
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double sign = labels_(i) > 0.5 ? 1.0 : -1.0;
    best = std::min(best, std::abs(1.0 - sign * s(i)));
  }
  return best;
}

}  // namespace fairdebug
