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

#ifndef FAIRDEBUG_PARETO_H_
#define FAIRDEBUG_PARETO_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fairdebug/dataset.h"
#include "fairdebug/learners.h"
#include "json.hpp"

namespace fairdebug {

enum class Objective { kEod, kAod };

std::string_view objective_name(Objective objective);  // "EOD" / "AOD"
Objective parse_objective(std::string_view name);

struct SearchConfig {
  Algorithm algorithm = Algorithm::kDecisionTree;
  Objective objective = Objective::kEod;
  double epsilon = 0.05;  // accuracy band
  size_t population_size = 20;
  size_t budget = 200;  // evaluations
  uint64_t seed = 0;
  std::optional<double> mutation_rate;  // default 1 / #params
  size_t threads = 0;                   // 0: hardware concurrency

  // Throws Error(kConfig).
  void validate() const;
  double effective_mutation_rate() const;
  // The population never exceeds the budget.
  size_t effective_population() const;
};

void to_json(nlohmann::json& j, const SearchConfig& cfg);
SearchConfig search_config_from_json(const nlohmann::json& j);

struct Candidate {
  std::string id;
  size_t eval_index = 0;
  HyperParams hp;
  double accuracy = 0.0;
  double objective = 0.0;  // |EOD| or |AOD| on the held-out split
  double eod = 0.0;
  double aod = 0.0;
  std::string model_id;

  bool operator==(const Candidate& other) const = default;
};

void to_json(nlohmann::json& j, const Candidate& c);
Candidate candidate_from_json(const nlohmann::json& j);

// Maximize accuracy, minimize objective; at least one strict improvement.
bool dominates(const Candidate& a, const Candidate& b);

// Non-dominated candidates within the accuracy band
// accuracy >= (1 - epsilon) * best_accuracy. On an exact tie in both metrics
// the earlier member stays.
class ParetoArchive {
 public:
  explicit ParetoArchive(double epsilon = 0.05) : epsilon_(epsilon) {}

  // True when `c` joined the archive.
  bool offer(const Candidate& c);

  const std::vector<Candidate>& members() const { return members_; }
  double best_accuracy() const { return best_accuracy_; }
  double epsilon() const { return epsilon_; }
  double accuracy_floor() const { return (1.0 - epsilon_) * best_accuracy_; }
  bool contains(std::string_view candidate_id) const;

 private:
  double epsilon_;
  double best_accuracy_ = 0.0;
  bool seen_any_ = false;
  std::vector<Candidate> members_;
};

struct EvalResult {
  double accuracy = 0.0;
  double eod = 0.0;
  double aod = 0.0;
  std::string model_id;
};

// Scores one configuration. Must be safe to call concurrently; throwing
// fairdebug::Error marks the candidate as failed.
using Evaluator =
    std::function<EvalResult(const HyperParams& hp, uint64_t training_seed)>;

struct FailedEvaluation {
  size_t eval_index = 0;
  HyperParams hp;
  std::string error;
};

struct SearchObserver {
  std::function<void(size_t done, size_t budget)> on_progress;
  // Called after the archive merge of every generation (0 = initial sample).
  std::function<void(size_t generation, const ParetoArchive&)> on_generation;
};

struct SearchResult {
  SearchConfig config;
  std::vector<Candidate> evaluated;  // successful evaluations, in order
  std::vector<FailedEvaluation> failures;
  ParetoArchive archive;
  size_t generations = 0;
};

void to_json(nlohmann::json& j, const SearchResult& result);
SearchResult search_result_from_json(const nlohmann::json& j);

// Evolutionary search: uniform initial sample, binary tournaments on Pareto
// rank, uniform crossover, per-parameter mutation, (mu + lambda) survival.
// Throws Error(kSearch) when every evaluation failed.
SearchResult run_search(const SearchConfig& cfg, const Evaluator& evaluate,
                        const SearchObserver& observer = {});

// Evaluates every configuration once, in order, offering each to the archive.
SearchResult run_exhaustive(const SearchConfig& cfg,
                            std::span<const HyperParams> configs,
                            const Evaluator& evaluate,
                            const SearchObserver& observer = {});

// Cartesian product of per-parameter levels.
std::vector<HyperParams> hyperparam_grid(
    Algorithm algorithm, const std::map<std::string, std::vector<double>>& levels);

struct SearchRun {
  SearchResult result;
  std::map<std::string, TrainedModel> models;  // by model id
};

// Trains on split.train, scores on split.test.
SearchRun search(const SplitPair& split, const SearchConfig& cfg,
                 const SearchObserver& observer = {});
SearchRun search_grid(const SplitPair& split, const SearchConfig& cfg,
                      std::span<const HyperParams> configs,
                      const SearchObserver& observer = {});

// One entry per evaluated candidate with its is_pareto flag.
nlohmann::json archive_to_scatter(const ParetoArchive& archive,
                                  std::span<const Candidate> all_evaluated);

}  // namespace fairdebug

#endif  // FAIRDEBUG_PARETO_H_
