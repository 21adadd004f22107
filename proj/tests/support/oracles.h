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

#ifndef FAIRDEBUG_TESTS_SUPPORT_ORACLES_H_
#define FAIRDEBUG_TESTS_SUPPORT_ORACLES_H_

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "fairdebug/classifier.h"
#include "fairdebug/dataset.h"
#include "fairdebug/explainer.h"
#include "fairdebug/pareto.h"

namespace fairdebug::oracle {

// Pareto set by exhaustive pairwise comparison: in band, dominated by nothing
// offered, and no earlier candidate with identical metrics.
std::set<std::string> pareto_front(const std::vector<Candidate>& all,
                                   double epsilon);

// Logistic model over synth::small_mixed columns:
//   logit = 0.8 (x1 - 5) - 0.1 (x2 - 25) + 1.0 [color = red] - 0.8 [size = L]
// group carries no weight.
FunctionClassifier linear_fixture(const Schema& schema);

struct SignTally {
  size_t agree = 0;
  size_t total = 0;
  double rate() const { return total ? static_cast<double>(agree) / total : 0.0; }
};

// Expected sign of each surrogate weight: keeping the explained value instead
// of a random training value moves the logit by coef * (E[value | kept] -
// E[value]). Numeric columns use the quartile-bin mean of x's bin.
SignTally linear_sign_agreement(const Explanation& e, const Instance& x,
                                const Dataset& train);

}  // namespace fairdebug::oracle

#endif  // FAIRDEBUG_TESTS_SUPPORT_ORACLES_H_
