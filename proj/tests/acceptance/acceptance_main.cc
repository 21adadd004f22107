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

// Runs every primary acceptance criterion and prints one PASS/FAIL line each.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include "cli_runner.h"
#include "fairdebug/counterfactual.h"
#include "fairdebug/explainer.h"
#include "fairdebug/fairness.h"
#include "fairdebug/hash.h"
#include "fairdebug/learners.h"
#include "fairdebug/pareto.h"
#include "fairdebug/project.h"
#include "oracles.h"
#include "synthetic.h"

namespace fs = std::filesystem;
using namespace fairdebug;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::vector<ProxyRule> adult_rules() {
  std::ifstream in(fs::path(FAIRDEBUG_SOURCE_DIR) / "rules" / "adult_proxies.json");
  return parse_rules(nlohmann::json::parse(in));
}

Verdict gradients() {
  const auto start = std::chrono::steady_clock::now();
  double worst = 0;
  for (uint64_t seed : {1, 2, 3}) {
    const Dataset ds = synth::small_mixed(50, seed);
    worst = std::max(worst, grad_check({Algorithm::kLogReg,
                                        {{"lr", 0.1}, {"l2", 0.01 * seed}, {"epochs", 10}}},
                                       ds, seed, 20));
    worst = std::max(worst, grad_check({Algorithm::kLinSvm,
                                        {{"C", 0.5 * seed}, {"epochs", 10}}},
                                       ds, seed, 20));
  }
  const double t = seconds_since(start);
  return {worst < 1e-4 && t < 5.0,
          fmt("max relative error %.3g", worst) + fmt(", %.2f s", t)};
}

Verdict metric_fixtures() {
  const std::vector<std::string> groups = {"Male", "Female"};
  // Group 0: TPR 2/2, FPR 0/2. Group 1: TPR 1/2, FPR 0/2.
  std::vector<Outcome> rows = {{0, true, true},   {0, true, true},
                               {0, false, false}, {0, false, false},
                               {1, true, true},   {1, true, false},
                               {1, false, false}, {1, false, false}};
  const FairnessReport r = compute_report(rows, groups);
  for (auto& o : rows) o.predicted = o.label;
  const FairnessReport perfect = compute_report(rows, groups);
  const bool ok = r.eod == 0.5 && r.aod == 0.25 && perfect.eod == 0.0 &&
                  perfect.aod == 0.0;
  return {ok, fmt("EOD %g", r.eod) + fmt(", AOD %g", r.aod) +
                  fmt(", perfect EOD %g", perfect.eod) +
                  fmt(" AOD %g", perfect.aod)};
}

Verdict pareto_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const Dataset ds = synth::small_mixed(500, 1);
  const SplitPair split = split_80_20(ds, 4);
  const auto grid = hyperparam_grid(
      Algorithm::kDecisionTree,
      {{"max_depth", {1, 2, 3, 4, 5, 6, 7, 8, 10, 12, 15, 20, 25, 30}},
       {"min_samples_split", {2, 4, 8, 12, 16, 20, 25, 30, 40, 50}}});
  SearchConfig cfg;
  cfg.budget = grid.size();
  cfg.seed = 1;
  const SearchRun run = search_grid(split, cfg, grid);
  std::set<std::string> got;
  for (const auto& m : run.result.archive.members()) got.insert(m.id);
  const auto want = oracle::pareto_front(run.result.evaluated, cfg.epsilon);
  const double t = seconds_since(start);
  return {grid.size() <= 200 && run.result.evaluated.size() == grid.size() &&
              got == want && t < 120.0,
          std::to_string(grid.size()) + " configs, archive " +
              std::to_string(got.size()) + ", oracle " + std::to_string(want.size()) +
              fmt(", %.1f s", t)};
}

Verdict archive_properties() {
  size_t violations = 0, mismatches = 0;
  for (uint64_t trial = 0; trial < 100; ++trial) {
    std::mt19937_64 rng(1000 + trial);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Candidate> all(1000);
    for (size_t i = 0; i < all.size(); ++i) {
      all[i].id = "c" + std::to_string(i);
      all[i].accuracy = u(rng);
      all[i].objective = u(rng);
    }
    std::shuffle(all.begin(), all.end(), rng);
    ParetoArchive archive(0.05);
    for (const auto& c : all) archive.offer(c);
    const double floor = 0.95 * archive.best_accuracy();
    for (const auto& a : archive.members()) {
      if (a.accuracy < floor) ++violations;
      for (const auto& b : archive.members()) violations += dominates(a, b);
    }
    std::set<std::string> got;
    for (const auto& m : archive.members()) got.insert(m.id);
    mismatches += got != oracle::pareto_front(all, 0.05);
  }
  return {violations == 0 && mismatches == 0,
          "100 trials x 1000 candidates, " + std::to_string(violations) +
              " violations, " + std::to_string(mismatches) + " oracle mismatches"};
}

Verdict counterfactual_oracles() {
  const Dataset ds = synth::adult_like(5000, 3);
  const size_t sex = ds.schema().protected_index();
  const size_t age = ds.schema().require_index("age");
  const FunctionClassifier protected_only([sex](const Instance& x) {
    return std::get<std::string>(x[sex]) == "Male" ? 0.8 : 0.2;
  });
  const FunctionClassifier independent([age](const Instance& x) {
    return std::get<double>(x[age]) >= 45 ? 0.7 : 0.3;
  });
  size_t a = 0, b = 0;
  for (const auto& p : generate(protected_only, ds, 1000, 5)) a += p.is_id;
  for (const auto& p : generate(independent, ds, 1000, 5)) b += p.is_id;
  return {a == 1000 && b == 0, "protected-only " + std::to_string(a) +
                                   "/1000 ID, independent " + std::to_string(b) +
                                   "/1000 ID"};
}

Verdict proxy_mechanism() {
  const Dataset ds = synth::proxy_dataset(2520);
  const TrainedModel m = train(
      ds, {Algorithm::kDecisionTree, {{"max_depth", 2}, {"min_samples_split", 2}}}, 0);
  bool uses_proxy = false;
  for (const auto& tree : extract_logic(m).trees) {
    for (const auto& n : tree) uses_proxy |= !n.leaf && n.column == "relationship";
  }
  const auto pairs = generate(m, ds, 2000, 17);
  size_t raw = 0;
  for (const auto& p : pairs) raw += p.is_id;
  const AuditResult r = audit(pairs, adult_rules(), m, ds.schema());
  const double fp_share = raw ? static_cast<double>(r.summary.fp) / raw : 0.0;
  return {uses_proxy && raw >= 1 && fp_share >= 0.25,
          std::string(uses_proxy ? "tree splits on relationship" : "tree ignores proxy") +
              ", raw ID " + std::to_string(raw) + "/2000, FP " +
              std::to_string(r.summary.fp) + fmt(" (%.1f%% of raw ID)", 100 * fp_share)};
}

Verdict lime_sanity() {
  const Dataset ds = synth::small_mixed(800, 31);
  const FunctionClassifier model = oracle::linear_fixture(ds.schema());
  oracle::SignTally tally;
  for (size_t i = 0; i < 20; ++i) {
    ExplainOptions o;
    o.seed = 500 + i;
    o.top_k = 5;
    o.n_samples = 2000;
    const Instance& x = ds.rows()[i * 13];
    const auto t = oracle::linear_sign_agreement(explain(model, x, ds, o), x, ds);
    tally.agree += t.agree;
    tally.total += t.total;
  }
  const FunctionClassifier constant([](const Instance&) { return 0.42; });
  ExplainOptions o;
  o.seed = 1;
  o.top_k = 5;
  bool zeros = true;
  for (const auto& f : explain(constant, ds.rows()[0], ds, o).features) {
    zeros &= f.weight == 0.0;
  }
  return {tally.rate() >= 0.9 && zeros,
          fmt("sign agreement %.1f%%", 100 * tally.rate()) + " (" +
              std::to_string(tally.agree) + "/" + std::to_string(tally.total) +
              "), constant model " + (zeros ? "all-zero" : "nonzero") + " weights"};
}

Verdict end_to_end(const fs::path& work) {
  const fs::path csv = work / "adult_like.csv";
  std::ofstream(csv) << synth::adult_like_csv(synth::kAdultRows, 2024);
  cli::PipelineOptions o;
  o.binary = FAIRDEBUG_CLI;
  o.csv = csv;
  o.rules = fs::path(FAIRDEBUG_SOURCE_DIR) / "rules" / "adult_proxies.json";
  o.budget = 60;
  o.tests = 8000;
  o.samples = 1000;
  o.project = work / "run1";
  const auto start = std::chrono::steady_clock::now();
  const auto a = cli::run_pipeline(o);
  const double t = seconds_since(start);
  if (!a.ok) return {false, "first run failed at " + a.failed_step + ": " + a.error};
  o.project = work / "run2";
  const auto b = cli::run_pipeline(o);
  if (!b.ok) return {false, "second run failed at " + b.failed_step + ": " + b.error};
  const bool identical = a.reports == b.reports &&
                         read_file(work / "run1" / "manifest.json") ==
                             read_file(work / "run2" / "manifest.json");
  return {identical && t < 300.0,
          std::to_string(a.reports.size()) + " reports " +
              (identical ? "byte-identical" : "differ") + fmt(", %.1f s per run", t)};
}

Verdict persistence(const fs::path& work) {
  Project p("p-acceptance", "2026-01-01T00:00:00Z", synth::adult_like(4000, 8));
  p.make_split(2);
  SearchConfig cfg;
  cfg.budget = 20;
  cfg.seed = 4;
  const std::string sid = p.run_search(cfg);
  const std::string model = p.search(sid).result.archive.members().at(0).model_id;
  const std::string suite = p.generate_tests(model, 1000, 6);
  p.tests_from_split(model);
  p.run_audit(suite, adult_rules());
  ExplainOptions o;
  o.seed = 3;
  p.explain(model, p.data().rows()[0], "row-0", o);

  save(p, work / "saved");
  const Project back = load(work / "saved");
  bool reports = true;
  for (const auto& [id, m] : p.models()) reports &= back.model_report(id) == p.model_report(id);
  bool archives = true;
  for (const auto& [id, s] : p.searches()) {
    archives &= back.search(id).result.evaluated == s.result.evaluated &&
                back.search(id).result.archive.members() == s.result.archive.members();
  }
  bool suites = true;
  for (const auto& [id, s] : p.suites()) suites &= back.suite(id).pairs == s.pairs;
  save(back, work / "resaved");
  const std::string h1 = sha256_hex(read_file(work / "saved" / "manifest.json"));
  const std::string h2 = sha256_hex(read_file(work / "resaved" / "manifest.json"));
  const bool ok = back == p && reports && archives && suites && h1 == h2;
  return {ok, std::to_string(p.models().size()) + " models, " +
                  std::to_string(p.suites().size()) + " suites, manifest sha256 " +
                  h1.substr(0, 12) + (h1 == h2 ? " == " : " != ") + h2.substr(0, 12)};
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / "fairdebug_acceptance";
  fs::remove_all(work);
  fs::create_directories(work);
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"AC1 gradient correctness", gradients},
      {"AC2 metric fixtures", metric_fixtures},
      {"AC3 pareto equivalence", pareto_equivalence},
      {"AC4 archive properties", archive_properties},
      {"AC5 counterfactual oracles", counterfactual_oracles},
      {"AC6 proxy mechanism", proxy_mechanism},
      {"AC7 local explainer sanity", lime_sanity},
      {"AC8 end-to-end determinism", [&] { return end_to_end(work); }},
      {"AC9 persistence round trip", [&] { return persistence(work); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += !v.pass;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  fs::remove_all(work);
  return failed == 0 ? 0 : 1;
}
