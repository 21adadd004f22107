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

#include "oracles.h"

#include <cmath>
#include <map>

#include "fairdebug/stats.h"

namespace fairdebug::oracle {

std::set<std::string> pareto_front(const std::vector<Candidate>& all,
                                   double epsilon) {
  double best = 0;
  for (const auto& c : all) best = std::max(best, c.accuracy);
  const double floor = (1.0 - epsilon) * best;
  std::set<std::string> front;
  for (size_t i = 0; i < all.size(); ++i) {
    const Candidate& c = all[i];
    if (c.accuracy < floor) continue;
    bool keep = true;
    for (size_t k = 0; k < all.size() && keep; ++k) {
      const Candidate& o = all[k];
      const bool better = o.accuracy >= c.accuracy && o.objective <= c.objective &&
                          (o.accuracy > c.accuracy || o.objective < c.objective);
      const bool earlier_tie =
          k < i && o.accuracy == c.accuracy && o.objective == c.objective;
      if (better || earlier_tie) keep = false;
    }
    if (keep) front.insert(c.id);
  }
  return front;
}

namespace {

const std::map<std::string, double> kNumericCoef = {{"x1", 0.8}, {"x2", -0.1}};
const std::map<std::string, std::pair<std::string, double>> kCategoricalCoef = {
    {"color", {"red", 1.0}}, {"size", {"L", -0.8}}};

}  // namespace

FunctionClassifier linear_fixture(const Schema& schema) {
  const size_t x1 = schema.require_index("x1");
  const size_t x2 = schema.require_index("x2");
  const size_t color = schema.require_index("color");
  const size_t size = schema.require_index("size");
  return FunctionClassifier([=](const Instance& x) {
    const double logit = 0.8 * (std::get<double>(x[x1]) - 5.0) -
                         0.1 * (std::get<double>(x[x2]) - 25.0) +
                         (std::get<std::string>(x[color]) == "red" ? 1.0 : 0.0) -
                         (std::get<std::string>(x[size]) == "L" ? 0.8 : 0.0);
    return 1.0 / (1.0 + std::exp(-logit));
  });
}

SignTally linear_sign_agreement(const Explanation& e, const Instance& x,
                                const Dataset& train) {
  const Schema& schema = train.schema();
  SignTally tally;
  for (const auto& f : e.features) {
    const size_t c = schema.require_index(f.name);
    double expected = 0.0;
    if (auto it = kNumericCoef.find(f.name); it != kNumericCoef.end()) {
      std::vector<double> values;
      for (const auto& row : train.rows()) values.push_back(std::get<double>(row[c]));
      const QuartileBinner binner(f.name, values);
      const size_t bin = binner.bin(std::get<double>(x[c]));
      double all = 0, in_bin = 0;
      size_t n_bin = 0;
      for (double v : values) {
        all += v;
        if (binner.bin(v) == bin) {
          in_bin += v;
          ++n_bin;
        }
      }
      expected = it->second * (in_bin / n_bin - all / values.size());
    } else if (auto jt = kCategoricalCoef.find(f.name);
               jt != kCategoricalCoef.end()) {
      size_t hits = 0;
      for (const auto& row : train.rows()) {
        hits += std::get<std::string>(row[c]) == jt->second.first;
      }
      const double kept = std::get<std::string>(x[c]) == jt->second.first ? 1.0 : 0.0;
      expected = jt->second.second *
                 (kept - static_cast<double>(hits) / train.size());
    } else {
      continue;
    }
    if (expected == 0.0) continue;
    ++tally.total;
    tally.agree += (expected > 0) == (f.weight > 0) && f.weight != 0.0;
  }
  return tally;
}

}  // namespace fairdebug::oracle
