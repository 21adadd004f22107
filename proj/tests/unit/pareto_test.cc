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

#include "fairdebug/pareto.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "fairdebug/error.h"
#include "oracles.h"
#include "synthetic.h"

namespace fairdebug {
namespace {

Candidate cand(std::string id, double acc, double obj) {
  Candidate c;
  c.id = std::move(id);
  c.accuracy = acc;
  c.objective = obj;
  return c;
}

std::set<std::string> ids(const ParetoArchive& a) {
  std::set<std::string> out;
  for (const auto& m : a.members()) out.insert(m.id);
  return out;
}

TEST(DominanceTest, Examples) {
  EXPECT_TRUE(dominates(cand("a", 0.90, 0.02), cand("b", 0.85, 0.05)));
  EXPECT_FALSE(dominates(cand("a", 0.90, 0.05), cand("b", 0.85, 0.02)));
  EXPECT_FALSE(dominates(cand("b", 0.85, 0.02), cand("a", 0.90, 0.05)));
  const Candidate a = cand("a", 0.9, 0.1);
  EXPECT_FALSE(dominates(a, a));
}

TEST(ParetoArchiveTest, FivePointsTwoNonDominated) {
  const std::vector<Candidate> pts = {
      cand("p0", 0.80, 0.10), cand("p1", 0.82, 0.02), cand("p2", 0.84, 0.05),
      cand("p3", 0.81, 0.06), cand("p4", 0.83, 0.07)};
  ParetoArchive archive(0.05);
  for (const auto& p : pts) archive.offer(p);
  EXPECT_EQ(ids(archive), (std::set<std::string>{"p1", "p2"}));
  EXPECT_EQ(ids(archive), oracle::pareto_front(pts, 0.05));
}

TEST(ParetoArchiveTest, ExactTieKeepsEarlier) {
  ParetoArchive archive;
  EXPECT_TRUE(archive.offer(cand("first", 0.8, 0.1)));
  EXPECT_FALSE(archive.offer(cand("second", 0.8, 0.1)));
  EXPECT_TRUE(archive.contains("first"));
}

TEST(ParetoArchiveTest, BandPrunesWhenBestImproves) {
  ParetoArchive archive(0.05);
  archive.offer(cand("low", 0.70, 0.0));
  archive.offer(cand("high", 0.90, 0.2));
  EXPECT_FALSE(archive.contains("low"));
  EXPECT_DOUBLE_EQ(archive.accuracy_floor(), 0.95 * 0.90);
}

TEST(ParetoArchiveTest, RandomInsertionMatchesBruteForce) {
  for (uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(trial);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Candidate> all;
    for (size_t i = 0; i < 300; ++i) {
      // Coarse values force exact ties now and then.
      const double acc = std::round((0.6 + 0.35 * u(rng)) * 200) / 200;
      const double obj = std::round(u(rng) * 50) / 50;
      all.push_back(cand("c" + std::to_string(i), acc, obj));
    }
    ParetoArchive archive(0.05);
    for (const auto& c : all) archive.offer(c);
    ASSERT_EQ(ids(archive), oracle::pareto_front(all, 0.05)) << "trial " << trial;
    for (const auto& a : archive.members()) {
      EXPECT_GE(a.accuracy, archive.accuracy_floor());
      for (const auto& b : archive.members()) EXPECT_FALSE(dominates(a, b));
    }
  }
}

// Deterministic pseudo-metrics of a configuration.
Evaluator mock_evaluator() {
  return [](const HyperParams& hp, uint64_t) {
    const double d = hp.get("max_depth");
    const double s = hp.get("min_samples_split");
    EvalResult r;
    r.accuracy = 0.7 + 0.2 * (d / 30) - 0.05 * (s / 50) * (d / 30);
    r.eod = 0.3 * (d / 30) * (d / 30) - 0.1 * (s / 50) + 0.05;
    r.aod = r.eod / 2;
    r.model_id = "m" + std::to_string(static_cast<int>(d)) + "_" +
                 std::to_string(static_cast<int>(s));
    return r;
  };
}

SearchConfig dtree_config(size_t budget, uint64_t seed) {
  SearchConfig cfg;
  cfg.algorithm = Algorithm::kDecisionTree;
  cfg.budget = budget;
  cfg.seed = seed;
  cfg.threads = 2;
  return cfg;
}

TEST(SearchTest, BudgetOneKeepsSingleCandidate) {
  const SearchResult r = run_search(dtree_config(1, 5), mock_evaluator());
  ASSERT_EQ(r.evaluated.size(), 1u);
  ASSERT_EQ(r.archive.members().size(), 1u);
  EXPECT_EQ(r.archive.members()[0].id, r.evaluated[0].id);
}

TEST(SearchTest, RespectsBudgetAndSpace) {
  std::vector<size_t> progress;
  SearchObserver obs;
  obs.on_progress = [&](size_t done, size_t) { progress.push_back(done); };
  const SearchResult r = run_search(dtree_config(55, 1), mock_evaluator(), obs);
  EXPECT_EQ(r.evaluated.size(), 55u);
  for (const auto& c : r.evaluated) EXPECT_NO_THROW(c.hp.validate_in_space());
  EXPECT_TRUE(std::is_sorted(progress.begin(), progress.end()));
  EXPECT_EQ(progress.back(), 55u);
}

TEST(SearchTest, ArchiveEqualsBruteForceOverEvaluated) {
  const SearchResult r = run_search(dtree_config(120, 2), mock_evaluator());
  EXPECT_EQ(ids(r.archive), oracle::pareto_front(r.evaluated, 0.05));
}

TEST(SearchTest, Deterministic) {
  const SearchResult a = run_search(dtree_config(80, 9), mock_evaluator());
  SearchConfig cfg = dtree_config(80, 9);
  cfg.threads = 1;
  const SearchResult b = run_search(cfg, mock_evaluator());
  ASSERT_EQ(a.evaluated.size(), b.evaluated.size());
  for (size_t i = 0; i < a.evaluated.size(); ++i) {
    EXPECT_EQ(a.evaluated[i], b.evaluated[i]);
  }
  EXPECT_EQ(ids(a.archive), ids(b.archive));
}

// Area dominated by the archive inside [ref_acc, 1] x [0, 1] (objective
// minimized).
double hypervolume(std::vector<Candidate> m, double ref_acc) {
  std::erase_if(m, [&](const Candidate& c) { return c.accuracy < ref_acc; });
  std::sort(m.begin(), m.end(), [](const Candidate& a, const Candidate& b) {
    return a.accuracy > b.accuracy;
  });
  double area = 0, best_obj = 1.0;
  for (size_t i = 0; i < m.size(); ++i) {
    best_obj = std::min(best_obj, m[i].objective);
    const double next = i + 1 < m.size() ? m[i + 1].accuracy : ref_acc;
    area += (m[i].accuracy - std::max(next, ref_acc)) * (1.0 - best_obj);
  }
  return area;
}

TEST(SearchTest, HypervolumeNonDecreasingPerGeneration) {
  std::vector<std::vector<Candidate>> snapshots;
  SearchObserver obs;
  obs.on_generation = [&](size_t, const ParetoArchive& a) {
    snapshots.push_back(a.members());
  };
  const SearchResult r = run_search(dtree_config(150, 4), mock_evaluator(), obs);
  ASSERT_GE(snapshots.size(), 3u);
  // Measured above the final band floor, which every pruned member lies
  // below.
  const double ref = r.archive.accuracy_floor();
  for (size_t g = 1; g < snapshots.size(); ++g) {
    EXPECT_GE(hypervolume(snapshots[g], ref) + 1e-12,
              hypervolume(snapshots[g - 1], ref))
        << "generation " << g;
  }
}

TEST(SearchTest, FailedEvaluationsAreRecorded) {
  Evaluator flaky = [](const HyperParams& hp, uint64_t s) {
    if (hp.get("max_depth") < 10) throw Error(ErrorCode::kTraining, "nope");
    return mock_evaluator()(hp, s);
  };
  const SearchResult r = run_search(dtree_config(40, 3), flaky);
  EXPECT_EQ(r.evaluated.size() + r.failures.size(), 40u);
  Evaluator broken = [](const HyperParams&, uint64_t) -> EvalResult {
    throw Error(ErrorCode::kTraining, "nope");
  };
  try {
    run_search(dtree_config(10, 3), broken);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSearch);
  }
}

TEST(SearchTest, InvalidConfigRejected) {
  SearchConfig cfg = dtree_config(10, 0);
  cfg.epsilon = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.epsilon = -0.1;
  EXPECT_THROW(run_search(cfg, mock_evaluator()), Error);
  cfg.epsilon = 0.05;
  cfg.budget = 0;
  EXPECT_THROW(cfg.validate(), Error);
  cfg.budget = 10;
  cfg.mutation_rate = 2.0;
  EXPECT_THROW(cfg.validate(), Error);
}

TEST(SearchTest, ConfigJsonRoundTrips) {
  SearchConfig cfg = dtree_config(33, 7);
  cfg.objective = Objective::kAod;
  cfg.mutation_rate = 0.25;
  nlohmann::json j = cfg;
  const SearchConfig back = search_config_from_json(j);
  EXPECT_EQ(nlohmann::json(back), j);
}

TEST(ExhaustiveTest, RealGridMatchesBruteForce) {
  const Dataset ds = synth::small_mixed(500, 1);
  const SplitPair split = split_80_20(ds, 3);
  const std::vector<HyperParams> grid = hyperparam_grid(
      Algorithm::kDecisionTree,
      {{"max_depth", {1, 2, 3, 4, 6}}, {"min_samples_split", {2, 10, 40}}});
  ASSERT_EQ(grid.size(), 15u);
  const SearchRun run = search_grid(split, dtree_config(15, 0), grid);
  ASSERT_EQ(run.result.evaluated.size(), 15u);
  EXPECT_EQ(ids(run.result.archive), oracle::pareto_front(run.result.evaluated, 0.05));
  for (const auto& m : run.result.archive.members()) {
    EXPECT_EQ(run.models.count(m.model_id), 1u);
  }
}

TEST(ScatterTest, FlagsMatchArchive) {
  EXPECT_TRUE(archive_to_scatter(ParetoArchive(), {}).empty());
  const SearchResult r = run_search(dtree_config(60, 8), mock_evaluator());
  const nlohmann::json s = archive_to_scatter(r.archive, r.evaluated);
  ASSERT_EQ(s.size(), 60u);
  const std::set<std::string> front = oracle::pareto_front(r.evaluated, 0.05);
  for (size_t i = 0; i < s.size(); ++i) {
    EXPECT_EQ(s[i]["is_pareto"].get<bool>(),
              front.count(r.evaluated[i].id) == 1);
  }
}

}  // namespace
}  // namespace fairdebug
