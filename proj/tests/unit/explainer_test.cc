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

#include <gtest/gtest.h>

#include <sstream>

#include "fairdebug/error.h"
#include "oracles.h"
#include "synthetic.h"

namespace fairdebug {
namespace {

ExplainOptions options(uint64_t seed, size_t top_k = 5, size_t n = 1500) {
  ExplainOptions o;
  o.seed = seed;
  o.top_k = top_k;
  o.n_samples = n;
  o.threads = 2;
  return o;
}

const FeatureWeight* find(const Explanation& e, const std::string& name) {
  for (const auto& f : e.features) {
    if (f.name == name) return &f;
  }
  return nullptr;
}

TEST(ExplainerTest, ConstantModelHasZeroWeights) {
  const Dataset ds = synth::small_mixed(300, 1);
  FunctionClassifier model([](const Instance&) { return 0.37; });
  const Explanation e = explain(model, ds.rows()[4], ds, options(1), "row-4");
  ASSERT_EQ(e.features.size(), 5u);
  for (const auto& f : e.features) EXPECT_EQ(f.weight, 0.0) << f.name;
  EXPECT_EQ(e.intercept, 0.37);
  EXPECT_EQ(e.proba, 0.37);
  EXPECT_EQ(e.fidelity, 1.0);
  EXPECT_EQ(e.instance_id, "row-4");
}

TEST(ExplainerTest, LinearModelSignsAgree) {
  const Dataset ds = synth::small_mixed(600, 2);
  const FunctionClassifier model = oracle::linear_fixture(ds.schema());
  oracle::SignTally tally;
  for (size_t i = 0; i < 20; ++i) {
    const Instance& x = ds.rows()[i * 7];
    const auto t = oracle::linear_sign_agreement(
        explain(model, x, ds, options(100 + i)), x, ds);
    tally.agree += t.agree;
    tally.total += t.total;
  }
  EXPECT_GE(tally.total, 70u);
  EXPECT_GE(tally.rate(), 0.9);
}

TEST(ExplainerTest, TopKKeepsLargestWeights) {
  const Dataset ds = synth::small_mixed(400, 3);
  const FunctionClassifier model = oracle::linear_fixture(ds.schema());
  const Explanation e = explain(model, ds.rows()[0], ds, options(5, 2, 200));
  ASSERT_EQ(e.features.size(), 2u);
  EXPECT_GE(std::abs(e.features[0].weight), std::abs(e.features[1].weight));
  EXPECT_EQ(find(e, "group"), nullptr);
  EXPECT_GT(e.kernel_width, 0.0);
  EXPECT_EQ(e.n_samples, 200u);
}

TEST(ExplainerTest, DeterministicAcrossThreadCounts) {
  const Dataset ds = synth::small_mixed(300, 4);
  const FunctionClassifier model = oracle::linear_fixture(ds.schema());
  ExplainOptions a = options(9);
  ExplainOptions b = options(9);
  b.threads = 1;
  EXPECT_EQ(explain(model, ds.rows()[2], ds, a), explain(model, ds.rows()[2], ds, b));
  ExplainOptions c = options(10);
  EXPECT_NE(explain(model, ds.rows()[2], ds, a).features,
            explain(model, ds.rows()[2], ds, c).features);
}

// Rewrites the CSV with columns in a different order.
std::string permute_columns(const std::string& csv, const std::vector<size_t>& order) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    for (size_t i = 0; i < order.size(); ++i) {
      out << (i ? "," : "") << cells[order[i]];
    }
    out << "\n";
  }
  return out.str();
}

TEST(ExplainerTest, ColumnOrderDoesNotChangeWeights) {
  const Dataset ds = synth::small_mixed(300, 5);
  const Dataset permuted = set_protected(
      ingest_csv(permute_columns(to_csv(ds), {5, 3, 0, 4, 2, 1}), "y", "yes"),
      "group", {"A", "B"});
  ASSERT_EQ(permuted.schema().columns[0].name(), "y");
  const FunctionClassifier m1 = oracle::linear_fixture(ds.schema());
  const FunctionClassifier m2 = oracle::linear_fixture(permuted.schema());
  for (size_t r : {0, 11, 42}) {
    const Explanation e1 = explain(m1, ds.rows()[r], ds, options(3));
    const Explanation e2 = explain(m2, permuted.rows()[r], permuted, options(3));
    EXPECT_DOUBLE_EQ(e1.proba, e2.proba);
    ASSERT_EQ(e1.features.size(), e2.features.size());
    for (const auto& f : e1.features) {
      const FeatureWeight* g = find(e2, f.name);
      ASSERT_NE(g, nullptr) << f.name;
      EXPECT_NEAR(f.weight, g->weight, 1e-9) << f.name;
      EXPECT_EQ(f.condition, g->condition);
    }
  }
}

TEST(ExplainerTest, RejectsBadRequests) {
  const Dataset ds = synth::small_mixed(100, 6);
  FunctionClassifier model([](const Instance&) { return 0.5; });
  try {
    explain(model, ds.rows()[0], ds, options(1, 6, 59));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsage);
  }
  Instance short_row = ds.rows()[0];
  short_row.values.pop_back();
  EXPECT_THROW(explain(model, short_row, ds, options(1)), Error);

  const Dataset flat = ingest_csv("a,y\n1,p\n1,n\n", "y", "p");
  try {
    explain(model, flat.rows()[0], flat, options(1, 1, 50));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kExplanation);
  }
}

TEST(ExplainerTest, JsonRoundTrips) {
  const Dataset ds = synth::small_mixed(200, 7);
  const FunctionClassifier model = oracle::linear_fixture(ds.schema());
  const Explanation e = explain(model, ds.rows()[1], ds, options(2, 3, 300), "x");
  nlohmann::json j = e;
  EXPECT_EQ(explanation_from_json(j), e);
}

InteractionReport report_with(std::vector<std::pair<std::string, double>> assoc) {
  InteractionReport r;
  r.protected_column = "sex";
  r.groups = {"Male", "Female"};
  for (auto& [name, a] : assoc) {
    ColumnInteraction c;
    c.column = name;
    c.association = a;
    r.columns.push_back(c);
  }
  return r;
}

Explanation explanation_with(std::vector<std::pair<std::string, double>> weights) {
  Explanation e;
  for (auto& [name, w] : weights) e.features.push_back({name, "v", name + " = v", w});
  return e;
}

TEST(StoryTest, FlagsStrongAssociatedHeavyFeatures) {
  const auto report = report_with(
      {{"relationship", 0.9}, {"age", 0.1}, {"occupation", 0.7}});
  const auto e = explanation_with(
      {{"relationship", 0.5}, {"sex", 0.45}, {"age", -0.4}, {"occupation", 0.01}});
  const ExplanationStory s = explanation_story(e, report);
  ASSERT_EQ(s.features.size(), 4u);
  EXPECT_TRUE(s.features[0].proxy_suspect);
  EXPECT_TRUE(s.features[1].is_protected);
  EXPECT_FALSE(s.features[1].proxy_suspect);
  EXPECT_FALSE(s.features[1].association.has_value());
  EXPECT_FALSE(s.features[2].proxy_suspect);  // weak association
  EXPECT_FALSE(s.features[3].proxy_suspect);  // light weight
  ASSERT_EQ(s.sentences.size(), 1u);
  EXPECT_NE(s.sentences[0].find("relationship"), std::string::npos);
}

TEST(StoryTest, ThresholdsAreConfigurable) {
  const auto report = report_with({{"relationship", 0.4}});
  const auto e = explanation_with({{"relationship", 0.2}});
  EXPECT_FALSE(explanation_story(e, report).features[0].proxy_suspect);
  EXPECT_TRUE(explanation_story(e, report, {50.0, 0.3}).features[0].proxy_suspect);
  const auto zero = explanation_with({{"relationship", 0.0}});
  EXPECT_FALSE(explanation_story(zero, report, {0.0, 0.0}).features[0].proxy_suspect);
}

TEST(StoryTest, EmptyExplanation) {
  const ExplanationStory s = explanation_story(Explanation{}, report_with({}));
  EXPECT_TRUE(s.features.empty());
  EXPECT_TRUE(s.sentences.empty());
}

}  // namespace
}  // namespace fairdebug
