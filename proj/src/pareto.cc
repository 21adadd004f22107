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

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <random>

#include "fairdebug/error.h"
#include "fairdebug/fairness.h"
#include "fairdebug/util.h"

namespace fairdebug {

namespace {

using nlohmann::json;

std::string candidate_id(size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "c%04zu", index);
  return buf;
}

HyperParams sample_uniform(Algorithm algorithm, std::mt19937_64& rng) {
  HyperParams hp;
  hp.algorithm = algorithm;
  for (const auto& spec : param_space(algorithm)) {
    if (spec.kind == ParamKind::kInteger) {
      std::uniform_int_distribution<long long> d(std::llround(spec.lo),
                                                 std::llround(spec.hi));
      hp.params[spec.name] = static_cast<double>(d(rng));
    } else {
      std::uniform_real_distribution<double> d(spec.lo, spec.hi);
      hp.params[spec.name] = d(rng);
    }
  }
  return hp;
}

HyperParams crossover(const HyperParams& a, const HyperParams& b,
                      std::mt19937_64& rng) {
  HyperParams child = a;
  std::bernoulli_distribution coin(0.5);
  for (auto& [name, value] : child.params) {
    if (coin(rng)) value = b.params.at(name);
  }
  return child;
}

void mutate(HyperParams& hp, double rate, std::mt19937_64& rng) {
  std::bernoulli_distribution flip(rate);
  for (const auto& spec : param_space(hp.algorithm)) {
    if (!flip(rng)) continue;
    double& v = hp.params[spec.name];
    if (spec.kind == ParamKind::kInteger) {
      std::uniform_int_distribution<long long> d(std::llround(spec.lo),
                                                 std::llround(spec.hi));
      v = static_cast<double>(d(rng));
    } else {
      std::normal_distribution<double> step(0.0, 0.1 * spec.range());
      v = std::clamp(v + step(rng), spec.lo, spec.hi);
    }
  }
}

// Non-dominated sorting: rank 0 is the first front. Missing candidates
// (failed evaluations) rank last.
std::vector<size_t> pareto_ranks(
    const std::vector<std::optional<Candidate>>& pop) {
  constexpr size_t kUnranked = std::numeric_limits<size_t>::max();
  std::vector<size_t> rank(pop.size(), kUnranked);
  size_t remaining = 0;
  for (const auto& c : pop) remaining += c.has_value();
  for (size_t front = 0; remaining > 0; ++front) {
    std::vector<size_t> this_front;
    for (size_t i = 0; i < pop.size(); ++i) {
      if (!pop[i] || rank[i] != kUnranked) continue;
      bool dominated = false;
      for (size_t j = 0; j < pop.size() && !dominated; ++j) {
        if (j == i || !pop[j] || rank[j] != kUnranked) continue;
        dominated = dominates(*pop[j], *pop[i]);
      }
      if (!dominated) this_front.push_back(i);
    }
    for (size_t i : this_front) rank[i] = front;
    remaining -= this_front.size();
  }
  return rank;
}

struct Individual {
  HyperParams hp;
  std::optional<Candidate> candidate;
  size_t eval_index = 0;
};

class SearchState {
 public:
  SearchState(const SearchConfig& cfg, const Evaluator& evaluate,
              const SearchObserver& observer)
      : cfg_(cfg), evaluate_(evaluate), observer_(observer) {
    result_.config = cfg;
    result_.archive = ParetoArchive(cfg.epsilon);
  }

  // Evaluates `batch` (possibly concurrently), then merges in index order.
  std::vector<Individual> evaluate_batch(std::vector<HyperParams> batch) {
    const size_t base = next_index_;
    std::vector<Individual> out(batch.size());
    std::vector<std::string> errors(batch.size());
    const size_t threads =
        cfg_.threads == 0 ? default_thread_count() : cfg_.threads;
    parallel_for(batch.size(), threads, [&](size_t i) {
      Individual& ind = out[i];
      ind.hp = batch[i];
      ind.eval_index = base + i;
      try {
        const EvalResult r =
            evaluate_(ind.hp, mix_seed(cfg_.seed, ind.eval_index));
        if (!std::isfinite(r.accuracy) || !std::isfinite(r.eod) ||
            !std::isfinite(r.aod)) {
          throw Error(ErrorCode::kMetric, "non-finite metrics");
        }
        Candidate c;
        c.id = candidate_id(ind.eval_index);
        c.eval_index = ind.eval_index;
        c.hp = ind.hp;
        c.accuracy = r.accuracy;
        c.eod = r.eod;
        c.aod = r.aod;
        c.objective = std::abs(cfg_.objective == Objective::kEod ? r.eod : r.aod);
        c.model_id = r.model_id;
        ind.candidate = std::move(c);
      } catch (const Error& e) {
        errors[i] = e.what();
      }
    });
    for (size_t i = 0; i < out.size(); ++i) {
      if (out[i].candidate) {
        result_.evaluated.push_back(*out[i].candidate);
        result_.archive.offer(*out[i].candidate);
      } else {
        result_.failures.push_back({out[i].eval_index, out[i].hp, errors[i]});
      }
    }
    next_index_ += batch.size();
    if (observer_.on_progress) observer_.on_progress(next_index_, cfg_.budget);
    if (observer_.on_generation) {
      observer_.on_generation(result_.generations, result_.archive);
    }
    ++result_.generations;
    return out;
  }

  size_t evaluated() const { return next_index_; }

  SearchResult finish() {
    if (result_.evaluated.empty()) {
      std::string reason =
          result_.failures.empty() ? "no evaluations" : result_.failures[0].error;
      throw Error(ErrorCode::kSearch,
                  "every candidate failed to train; first error: " + reason);
    }
    return std::move(result_);
  }

 private:
  const SearchConfig& cfg_;
  const Evaluator& evaluate_;
  const SearchObserver& observer_;
  SearchResult result_;
  size_t next_index_ = 0;
};

EvalResult evaluate_on_split(const SplitPair& split, const HyperParams& hp,
                             uint64_t seed, std::mutex& mu,
                             std::map<std::string, TrainedModel>& models) {
  TrainedModel model = train(split.train, hp, seed);
  std::string id = model.content_id();
  const FairnessReport report = evaluate(model, split.test, id);
  {
    std::lock_guard<std::mutex> lock(mu);
    models.emplace(id, std::move(model));
  }
  return {report.accuracy, report.eod, report.aod, std::move(id)};
}

}  // namespace

std::string_view objective_name(Objective objective) {
  return objective == Objective::kEod ? "EOD" : "AOD";
}

Objective parse_objective(std::string_view name) {
  if (name == "EOD" || name == "eod") return Objective::kEod;
  if (name == "AOD" || name == "aod") return Objective::kAod;
  throw Error(ErrorCode::kConfig,
              "unknown objective '" + std::string(name) + "' (EOD or AOD)");
}

void SearchConfig::validate() const {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::kConfig, "epsilon must lie in [0, 1]");
  }
  if (budget < 1) throw Error(ErrorCode::kConfig, "budget must be >= 1");
  if (population_size < 2) {
    throw Error(ErrorCode::kConfig, "population_size must be >= 2");
  }
  if (mutation_rate && !(*mutation_rate >= 0.0 && *mutation_rate <= 1.0)) {
    throw Error(ErrorCode::kConfig, "mutation_rate must lie in [0, 1]");
  }
}

double SearchConfig::effective_mutation_rate() const {
  return mutation_rate.value_or(1.0 / param_space(algorithm).size());
}

size_t SearchConfig::effective_population() const {
  return std::min(population_size, budget);
}

void to_json(json& j, const SearchConfig& cfg) {
  j = {{"algorithm", algorithm_name(cfg.algorithm)},
       {"objective", objective_name(cfg.objective)},
       {"epsilon", cfg.epsilon},
       {"population_size", cfg.population_size},
       {"budget", cfg.budget},
       {"seed", cfg.seed},
       {"mutation_rate", cfg.effective_mutation_rate()}};
}

SearchConfig search_config_from_json(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfig, "search config must be a JSON object");
  }
  SearchConfig cfg;
  try {
    cfg.algorithm = parse_algorithm(j.value("algorithm", "dtree"));
    cfg.objective = parse_objective(j.value("objective", "EOD"));
    cfg.epsilon = j.value("epsilon", 0.05);
    cfg.population_size = j.value("population_size", size_t{20});
    cfg.budget = j.value("budget", size_t{200});
    if (!j.contains("seed")) {
      throw Error(ErrorCode::kConfig, "search config requires a seed");
    }
    cfg.seed = j.at("seed").get<uint64_t>();
    if (j.contains("mutation_rate") && !j.at("mutation_rate").is_null()) {
      cfg.mutation_rate = j.at("mutation_rate").get<double>();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("bad search config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

void to_json(json& j, const Candidate& c) {
  j = {{"id", c.id},
       {"eval_index", c.eval_index},
       {"hyperparams", c.hp},
       {"accuracy", c.accuracy},
       {"objective", c.objective},
       {"eod", c.eod},
       {"aod", c.aod},
       {"model_id", c.model_id}};
}

Candidate candidate_from_json(const json& j) {
  Candidate c;
  c.id = j.at("id").get<std::string>();
  c.eval_index = j.at("eval_index").get<size_t>();
  c.hp = hyperparams_from_json(j.at("hyperparams"));
  c.accuracy = j.at("accuracy").get<double>();
  c.objective = j.at("objective").get<double>();
  c.eod = j.at("eod").get<double>();
  c.aod = j.at("aod").get<double>();
  c.model_id = j.at("model_id").get<std::string>();
  return c;
}

bool dominates(const Candidate& a, const Candidate& b) {
  return a.accuracy >= b.accuracy && a.objective <= b.objective &&
         (a.accuracy > b.accuracy || a.objective < b.objective);
}

bool ParetoArchive::offer(const Candidate& c) {
  if (!seen_any_ || c.accuracy > best_accuracy_) {
    best_accuracy_ = c.accuracy;
    seen_any_ = true;
    const double floor = accuracy_floor();
    std::erase_if(members_,
                  [floor](const Candidate& m) { return m.accuracy < floor; });
  }
  if (c.accuracy < accuracy_floor()) return false;
  for (const auto& m : members_) {
    if (dominates(m, c)) return false;
    if (m.accuracy == c.accuracy && m.objective == c.objective) return false;
  }
  std::erase_if(members_, [&c](const Candidate& m) { return dominates(c, m); });
  members_.push_back(c);
  return true;
}

bool ParetoArchive::contains(std::string_view candidate_id) const {
  return std::any_of(members_.begin(), members_.end(),
                     [&](const Candidate& m) { return m.id == candidate_id; });
}

void to_json(json& j, const SearchResult& result) {
  json failures = json::array();
  for (const auto& f : result.failures) {
    failures.push_back(
        {{"eval_index", f.eval_index}, {"hyperparams", f.hp}, {"error", f.error}});
  }
  json members = json::array();
  for (const auto& m : result.archive.members()) members.push_back(m.id);
  j = {{"config", result.config},
       {"evaluated", result.evaluated},
       {"failures", std::move(failures)},
       {"archive", {{"members", std::move(members)},
                    {"best_accuracy", result.archive.best_accuracy()},
                    {"epsilon", result.archive.epsilon()}}},
       {"generations", result.generations}};
}

SearchResult search_result_from_json(const json& j) {
  try {
    SearchResult r;
    r.config = search_config_from_json(j.at("config"));
    for (const auto& jc : j.at("evaluated")) {
      r.evaluated.push_back(candidate_from_json(jc));
    }
    for (const auto& jf : j.at("failures")) {
      r.failures.push_back({jf.at("eval_index").get<size_t>(),
                            hyperparams_from_json(jf.at("hyperparams")),
                            jf.at("error").get<std::string>()});
    }
    // Replaying the insertion sequence reproduces the archive exactly.
    r.archive = ParetoArchive(r.config.epsilon);
    for (const auto& c : r.evaluated) r.archive.offer(c);
    const auto stored = j.at("archive").at("members").get<std::vector<std::string>>();
    std::vector<std::string> replayed;
    for (const auto& m : r.archive.members()) replayed.push_back(m.id);
    if (stored != replayed) {
      throw Error(ErrorCode::kIntegrity,
                  "stored archive does not match its evaluation sequence");
    }
    r.generations = j.at("generations").get<size_t>();
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad search JSON: ") + e.what());
  }
}

SearchResult run_search(const SearchConfig& cfg, const Evaluator& evaluate,
                        const SearchObserver& observer) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  const size_t pop_size = cfg.effective_population();
  const double rate = cfg.effective_mutation_rate();
  SearchState state(cfg, evaluate, observer);

  std::vector<HyperParams> initial;
  for (size_t i = 0; i < pop_size; ++i) {
    initial.push_back(sample_uniform(cfg.algorithm, rng));
  }
  std::vector<Individual> population = state.evaluate_batch(std::move(initial));

  while (state.evaluated() < cfg.budget) {
    std::vector<std::optional<Candidate>> scored;
    for (const auto& ind : population) scored.push_back(ind.candidate);
    const std::vector<size_t> rank = pareto_ranks(scored);
    std::uniform_int_distribution<size_t> pick(0, population.size() - 1);
    auto tournament = [&]() -> const Individual& {
      const size_t a = pick(rng), b = pick(rng);
      if (rank[a] != rank[b]) return population[rank[a] < rank[b] ? a : b];
      return population[std::min(a, b)];
    };

    // A full generation is always drawn so the random stream, and thus every
    // evaluated prefix, does not depend on the budget.
    std::vector<HyperParams> offspring;
    for (size_t k = 0; k < pop_size; ++k) {
      const Individual& p1 = tournament();
      const Individual& p2 = tournament();
      HyperParams child = crossover(p1.hp, p2.hp, rng);
      mutate(child, rate, rng);
      offspring.push_back(std::move(child));
    }
    offspring.resize(std::min(offspring.size(), cfg.budget - state.evaluated()));
    std::vector<Individual> children = state.evaluate_batch(std::move(offspring));

    // (mu + lambda): keep the best pop_size by (rank, evaluation order).
    std::vector<Individual> pool = std::move(population);
    for (auto& c : children) pool.push_back(std::move(c));
    std::vector<std::optional<Candidate>> pool_scored;
    for (const auto& ind : pool) pool_scored.push_back(ind.candidate);
    const std::vector<size_t> pool_rank = pareto_ranks(pool_scored);
    std::vector<size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      if (pool_rank[a] != pool_rank[b]) return pool_rank[a] < pool_rank[b];
      return pool[a].eval_index < pool[b].eval_index;
    });
    population.clear();
    for (size_t i = 0; i < pop_size && i < order.size(); ++i) {
      population.push_back(pool[order[i]]);
    }
  }
  return state.finish();
}

SearchResult run_exhaustive(const SearchConfig& cfg,
                            std::span<const HyperParams> configs,
                            const Evaluator& evaluate,
                            const SearchObserver& observer) {
  SearchConfig exhaustive = cfg;
  exhaustive.budget = configs.size();
  exhaustive.validate();
  SearchState state(exhaustive, evaluate, observer);
  state.evaluate_batch(std::vector<HyperParams>(configs.begin(), configs.end()));
  return state.finish();
}

std::vector<HyperParams> hyperparam_grid(
    Algorithm algorithm,
    const std::map<std::string, std::vector<double>>& levels) {
  std::vector<HyperParams> out(1);
  out[0].algorithm = algorithm;
  for (const auto& spec : param_space(algorithm)) {
    const auto it = levels.find(spec.name);
    if (it == levels.end() || it->second.empty()) {
      throw Error(ErrorCode::kConfig, "grid needs levels for '" + spec.name + "'");
    }
    std::vector<HyperParams> next;
    for (const auto& base : out) {
      for (double v : it->second) {
        HyperParams hp = base;
        hp.params[spec.name] = v;
        next.push_back(std::move(hp));
      }
    }
    out = std::move(next);
  }
  for (const auto& hp : out) hp.validate_in_space();
  return out;
}

SearchRun search(const SplitPair& split, const SearchConfig& cfg,
                 const SearchObserver& observer) {
  SearchRun run;
  std::mutex mu;
  const Evaluator evaluator = [&](const HyperParams& hp, uint64_t seed) {
    return evaluate_on_split(split, hp, seed, mu, run.models);
  };
  run.result = run_search(cfg, evaluator, observer);
  return run;
}

SearchRun search_grid(const SplitPair& split, const SearchConfig& cfg,
                      std::span<const HyperParams> configs,
                      const SearchObserver& observer) {
  SearchRun run;
  std::mutex mu;
  const Evaluator evaluator = [&](const HyperParams& hp, uint64_t seed) {
    return evaluate_on_split(split, hp, seed, mu, run.models);
  };
  run.result = run_exhaustive(cfg, configs, evaluator, observer);
  return run;
}

json archive_to_scatter(const ParetoArchive& archive,
                        std::span<const Candidate> all_evaluated) {
  json points = json::array();
  for (const auto& c : all_evaluated) {
    points.push_back({{"candidate_id", c.id},
                      {"model_id", c.model_id},
                      {"accuracy", c.accuracy},
                      {"objective", c.objective},
                      {"eod", c.eod},
                      {"aod", c.aod},
                      {"hyperparams", c.hp},
                      {"is_pareto", archive.contains(c.id)}});
  }
  return points;
}

}  // namespace fairdebug
