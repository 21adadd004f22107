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

#ifndef FAIRDEBUG_LINEAR_OBJECTIVE_H_
#define FAIRDEBUG_LINEAR_OBJECTIVE_H_

#include <Eigen/Dense>

#include "fairdebug/dataset.h"
#include "fairdebug/learners.h"

namespace fairdebug {

// Training objective of the linear learners over parameters [w; b].
//   logistic: mean log-loss + l2 * |w|^2
//   hinge:    mean max(0, 1 - y (w.x + b)) + lambda * |w|^2, y in {-1, +1}
// The bias is not regularized.
class LinearObjective {
 public:
  enum class Loss { kLogistic, kHinge };

  LinearObjective(Loss loss, Eigen::MatrixXd features, Eigen::VectorXd labels,
                  double regularization);

  // Objective for `hp` on `data`, features encoded with `layout`. The hinge
  // regularizer is 1 / (2 C n).
  static LinearObjective for_hyperparams(const HyperParams& hp,
                                         const FeatureLayout& layout,
                                         const Dataset& data);

  double value(const Eigen::VectorXd& params) const;
  // Analytic gradient. For the hinge loss this is the subgradient that treats
  // margins exactly at 1 as inactive.
  Eigen::VectorXd gradient(const Eigen::VectorXd& params) const;
  // min |1 - y s| over rows: distance of the nearest row to the hinge kink.
  double kink_distance(const Eigen::VectorXd& params) const;

  Eigen::Index dimension() const { return features_.cols() + 1; }
  Eigen::Index rows() const { return features_.rows(); }
  Loss loss() const { return loss_; }
  double regularization() const { return regularization_; }

 private:
  Eigen::VectorXd scores(const Eigen::VectorXd& params) const;

  Loss loss_;
  Eigen::MatrixXd features_;
  Eigen::VectorXd labels_;  // 0/1
  double regularization_;
};

Eigen::MatrixXd encode_linear_matrix(const FeatureLayout& layout,
                                     const Dataset& data);

}  // namespace fairdebug

#endif  // FAIRDEBUG_LINEAR_OBJECTIVE_H_
