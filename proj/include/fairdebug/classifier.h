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

#ifndef FAIRDEBUG_CLASSIFIER_H_
#define FAIRDEBUG_CLASSIFIER_H_

#include <functional>
#include <utility>

#include "fairdebug/dataset.h"

namespace fairdebug {

// Probability threshold for a positive decision. Ties classify positive.
inline constexpr double kDecisionThreshold = 0.5;

inline bool is_positive(double proba) { return proba >= kDecisionThreshold; }

// Anything that scores an instance. Implementations must be safe to call
// concurrently.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual double predict_proba(const Instance& x) const = 0;
  bool predict(const Instance& x) const { return is_positive(predict_proba(x)); }
};

// Wraps a callable; used for oracle models in tests and mock evaluators.
class FunctionClassifier final : public Classifier {
 public:
  explicit FunctionClassifier(std::function<double(const Instance&)> fn)
      : fn_(std::move(fn)) {}
  double predict_proba(const Instance& x) const override { return fn_(x); }

 private:
  std::function<double(const Instance&)> fn_;
};

}  // namespace fairdebug

#endif  // FAIRDEBUG_CLASSIFIER_H_
