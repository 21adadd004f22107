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

// Command-line driver. stdout carries data, stderr carries logs. Exit codes:
// 0 success, 2 validation error, 1 internal error.

#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fairdebug/csv.h"
#include "fairdebug/error.h"
#include "fairdebug/hash.h"
#include "fairdebug/payloads.h"
#include "fairdebug/project.h"
#include "fairdebug/service.h"
#include "fairdebug/stats.h"
#include "httplib.h"
#include "json.hpp"

namespace fs = std::filesystem;
using fairdebug::Error;
using fairdebug::ErrorCode;
using fairdebug::Project;
using nlohmann::json;

namespace {

struct Globals {
  std::string project_dir;
  std::string format = "json";
  size_t threads = 0;
};

// While a mutating command runs, output is buffered and only written once the
// project has been saved.
std::ostringstream* pending_output = nullptr;

std::ostream& out() { return pending_output ? *pending_output : std::cout; }

void emit(const json& j) { out() << j.dump(2) << "\n"; }

void require_project_flag(const Globals& g) {
  if (g.project_dir.empty()) throw Error(ErrorCode::kUsage, "--project DIR is required");
}

Project load_project(const Globals& g) {
  require_project_flag(g);
  return fairdebug::load(g.project_dir);
}

// Load, mutate and save under the writer lock.
template <typename Fn>
void mutate(const Globals& g, Fn&& fn) {
  require_project_flag(g);
  fairdebug::ProjectLock lock(g.project_dir);
  Project p = fairdebug::load(g.project_dir);
  std::ostringstream buffer;
  pending_output = &buffer;
  try {
    fn(p);
  } catch (...) {
    pending_output = nullptr;
    throw;
  }
  pending_output = nullptr;
  fairdebug::save(p, g.project_dir);
  std::cout << buffer.str();
}

bool csv_format(const Globals& g) {
  if (g.format == "json") return false;
  if (g.format == "csv") return true;
  throw Error(ErrorCode::kUsage, "--format must be json or csv");
}

uint64_t parse_seed(const std::string& text) {
  try {
    size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::kUsage, "--seed must be a non-negative integer");
}

std::vector<std::string> split_list(const std::string& text) {
  auto records = fairdebug::csv::parse(text);
  if (records.empty()) return {};
  return std::move(records[0]);
}

std::string creation_time() {
  // SOURCE_DATE_EPOCH pins the timestamp for reproducible project directories.
  std::time_t t = std::time(nullptr);
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) t = std::atoll(epoch);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_text_arg(const std::string& arg) {
  if (!arg.empty() && arg[0] == '@') return fairdebug::read_file(arg.substr(1));
  return arg;
}

std::string csv_line(const std::vector<std::string>& fields) {
  return fairdebug::csv::format_record(fields) + "\n";
}

std::string num(double v) { return fairdebug::format_number(v); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fairness debugging workbench"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--project", g.project_dir, "Project directory");
  app.add_option("--format", g.format, "Output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");

  std::function<void()> action;

  // ingest
  auto* ingest = app.add_subcommand("ingest", "Create a project from a CSV file");
  std::string csv_path, label, positive, kinds;
  ingest->add_option("csv", csv_path, "CSV file with a header row")->required();
  ingest->add_option("--label", label, "Label column")->required();
  ingest->add_option("--positive", positive, "Positive label value")->required();
  ingest->add_option("--kinds", kinds,
                     "JSON object column -> categorical|numeric (or @file)");
  ingest->callback([&] {
    action = [&] {
      require_project_flag(g);
      if (fs::exists(fs::path(g.project_dir) / "manifest.json")) {
        throw Error(ErrorCode::kUsage, "a project already exists in " + g.project_dir);
      }
      const std::string text = fairdebug::read_file(csv_path);
      const auto overrides = kinds.empty()
                                 ? fairdebug::KindOverrides{}
                                 : fairdebug::parse_kind_overrides(read_text_arg(kinds));
      fairdebug::Dataset ds = fairdebug::ingest_csv(text, label, positive, overrides);
      const std::string id =
          "p-" + fairdebug::sha256_hex(text + '\0' + label + '\0' + positive)
                     .substr(0, 12);
      Project p(id, creation_time(), std::move(ds));
      fairdebug::ProjectLock lock(g.project_dir);
      fairdebug::save(p, g.project_dir);
      std::cerr << "ingested " << p.data().size() << " rows into " << g.project_dir
                << "\n";
      emit({{"id", id},
            {"rows", p.data().size()},
            {"schema", fairdebug::schema_to_json(p.schema())}});
    };
  });

  // protect
  auto* protect = app.add_subcommand("protect", "Select the protected attribute");
  std::string protect_column, protect_groups;
  protect->add_option("--column", protect_column, "Protected column")->required();
  protect->add_option("--groups", protect_groups,
                      "Comma-separated groups, reference group first")
      ->required();
  protect->callback([&] {
    action = [&] {
      mutate(g, [&](Project& p) {
        p.set_protected(protect_column, split_list(protect_groups));
        emit({{"schema", fairdebug::schema_to_json(p.schema())}});
      });
    };
  });

  // split
  auto* split = app.add_subcommand("split", "Seeded 80/20 train/test split");
  std::string split_seed;
  split->add_option("--seed", split_seed, "Random seed")->required();
  split->callback([&] {
    action = [&] {
      mutate(g, [&](Project& p) {
        const auto& s = p.make_split(parse_seed(split_seed));
        emit({{"split_id", p.split_id()},
              {"seed", s.seed},
              {"train", s.train.size()},
              {"test", s.test.size()}});
      });
    };
  });

  // interactions
  auto* inter = app.add_subcommand("interactions",
                                   "Feature associations with the protected attribute");
  std::string inter_column;
  inter->add_option("--column", inter_column, "Only this column, with its histogram");
  inter->callback([&] {
    action = [&] {
      const Project p = load_project(g);
      const auto report = fairdebug::interactions(p.data());
      if (!inter_column.empty()) {
        const auto* ci = report.find(inter_column);
        if (!ci) {
          throw Error(ErrorCode::kNotFound,
                      "no histogram for column '" + inter_column + "'");
        }
        if (csv_format(g)) {
          std::vector<std::string> header{"value"};
          for (const auto& grp : report.groups) header.push_back(grp);
          out() << csv_line(header);
          for (const auto& bin : ci->histogram) {
            std::vector<std::string> row{bin.value};
            for (double v : bin.proportions) row.push_back(num(v));
            out() << csv_line(row);
          }
          return;
        }
        json body = *ci;
        body["groups"] = report.groups;
        emit(body);
        return;
      }
      if (csv_format(g)) {
        out() << csv_line({"column", "kind", "statistic", "association_score"});
        for (const auto& c : report.columns) {
          out() << csv_line({c.column, std::string(fairdebug::column_kind_name(c.kind)),
                                 c.statistic, num(c.association)});
        }
        return;
      }
      emit(json(report));
    };
  });

  // search
  auto* search = app.add_subcommand("search", "Hyperparameter search for Pareto models");
  std::string algo = "dtree", objective = "EOD", search_seed;
  double epsilon = 0.05;
  size_t budget = 200, population = 20;
  std::optional<double> mutation;
  search->add_option("--algo", algo, "logreg, linsvm, dtree or rforest")
      ->check(CLI::IsMember({"logreg", "linsvm", "dtree", "rforest"}));
  search->add_option("--objective", objective, "EOD or AOD")
      ->check(CLI::IsMember({"EOD", "AOD"}));
  search->add_option("--epsilon", epsilon, "Accuracy band");
  search->add_option("--budget", budget, "Number of evaluations");
  search->add_option("--population", population, "Population size");
  search->add_option("--mutation-rate", mutation, "Per-parameter mutation rate");
  search->add_option("--seed", search_seed, "Random seed")->required();
  search->callback([&] {
    action = [&] {
      json cfg_json = {{"algorithm", algo},
                       {"objective", objective},
                       {"epsilon", epsilon},
                       {"budget", budget},
                       {"population_size", population},
                       {"seed", parse_seed(search_seed)}};
      if (mutation) cfg_json["mutation_rate"] = *mutation;
      fairdebug::SearchConfig cfg = fairdebug::search_config_from_json(cfg_json);
      cfg.threads = g.threads;
      mutate(g, [&](Project& p) {
        if (!p.schema().has_protected()) {
          throw Error(ErrorCode::kUsage, "set a protected attribute before searching");
        }
        if (!p.has_split()) {
          p.make_split(cfg.seed);
          std::cerr << "no split yet; created " << p.split_id() << " with seed "
                    << cfg.seed << "\n";
        }
        const std::string id = p.run_search(cfg);
        const auto& record = p.search(id);
        std::cerr << "search " << id << ": " << record.result.evaluated.size()
                  << " evaluated, " << record.result.archive.members().size()
                  << " on the front\n";
        if (csv_format(g)) {
          out() << csv_line({"candidate_id", "model_id", "accuracy", "objective",
                                 "eod", "aod", "is_pareto"});
          for (const auto& c : record.result.evaluated) {
            out() << csv_line({c.id, c.model_id, num(c.accuracy), num(c.objective),
                                   num(c.eod), num(c.aod),
                                   record.result.archive.contains(c.id) ? "true"
                                                                        : "false"});
          }
          return;
        }
        emit(fairdebug::archive_payload(record));
      });
    };
  });

  // logic / report
  auto* logic = app.add_subcommand("logic", "Model logic: weights or tree");
  std::string logic_model;
  logic->add_option("--model", logic_model, "Model id")->required();
  logic->callback([&] {
    action = [&] {
      const Project p = load_project(g);
      emit(json(fairdebug::extract_logic(p.model(logic_model))));
    };
  });
  auto* report = app.add_subcommand("report", "Fairness report of a model on the test split");
  std::string report_model;
  report->add_option("--model", report_model, "Model id")->required();
  report->callback([&] {
    action = [&] {
      const Project p = load_project(g);
      emit(json(p.model_report(report_model)));
    };
  });

  // tests
  auto* tests = app.add_subcommand("tests", "Counterfactual discrimination tests");
  tests->require_subcommand(1);
  auto* generate = tests->add_subcommand("generate", "Generate random test pairs");
  std::string gen_model, gen_seed;
  size_t gen_n = 0;
  bool from_split = false;
  generate->add_option("--model", gen_model, "Model id")->required();
  generate->add_option("--n", gen_n, "Number of pairs");
  generate->add_option("--seed", gen_seed, "Random seed");
  generate->add_flag("--from-split", from_split,
                     "Labeled pairs from the test split instead of random inputs");
  generate->callback([&] {
    action = [&] {
      if (!from_split) {
        if (gen_seed.empty()) throw Error(ErrorCode::kUsage, "--seed is required");
        if (gen_n == 0) throw Error(ErrorCode::kSize, "--n must be at least 1");
        if (gen_n > fairdebug::kMaxTestPairs) {
          throw Error(ErrorCode::kSize, "--n must be at most 100000");
        }
      }
      mutate(g, [&](Project& p) {
        const std::string id =
            from_split ? p.tests_from_split(gen_model)
                       : p.generate_tests(gen_model, gen_n, parse_seed(gen_seed),
                                          g.threads);
        const auto& suite = p.suite(id);
        json counts = json::object();
        size_t ids = 0;
        for (const auto& pair : suite.pairs) {
          counts[std::string(fairdebug::category_name(pair.category))] =
              counts.value(std::string(fairdebug::category_name(pair.category)), 0) + 1;
          ids += pair.is_id;
        }
        std::cerr << "suite " << id << ": " << suite.pairs.size() << " pairs, " << ids
                  << " discriminatory\n";
        emit({{"suite_id", id},
              {"model_id", suite.model_id},
              {"source", suite.source},
              {"seed", suite.seed},
              {"pairs", suite.pairs.size()},
              {"discriminatory", ids},
              {"categories", counts}});
      });
    };
  });

  auto* list = tests->add_subcommand("list", "List test pairs");
  std::string list_suite, list_filter = "all";
  size_t list_offset = 0;
  std::optional<size_t> list_limit;
  list->add_option("--suite", list_suite, "Test suite id (optional with one suite)");
  list->add_option("--filter", list_filter,
                   "all, id, a category name, or TP/FP/TN/FN");
  list->add_option("--offset", list_offset, "Skip this many pairs");
  list->add_option("--limit", list_limit, "Return at most this many pairs");
  list->callback([&] {
    action = [&] {
      const Project p = load_project(g);
      std::string suite_id = list_suite;
      if (suite_id.empty()) {
        if (p.suites().size() != 1) {
          throw Error(ErrorCode::kUsage, "--suite is required");
        }
        suite_id = p.suites().begin()->first;
      }
      const auto& suite = p.suite(suite_id);
      const auto pairs = fairdebug::filter_pairs(
          suite.pairs, fairdebug::PairFilter::parse(list_filter));
      const size_t begin = std::min(list_offset, pairs.size());
      const size_t end =
          list_limit ? std::min(pairs.size(), begin + *list_limit) : pairs.size();
      if (csv_format(g)) {
        out() << csv_line({"id", "category", "is_id", "proba_original",
                               "proba_counterfactual", "label_positive"});
        for (size_t i = begin; i < end; ++i) {
          const auto& t = pairs[i];
          out() << csv_line({t.id, std::string(fairdebug::category_name(t.category)),
                                 t.is_id ? "true" : "false", num(t.proba_original),
                                 num(t.proba_counterfactual),
                                 t.label_positive ? (*t.label_positive ? "true" : "false")
                                                  : ""});
        }
        return;
      }
      json out = json::array();
      for (size_t i = begin; i < end; ++i) {
        out.push_back(fairdebug::pair_to_json(p.schema(), pairs[i]));
      }
      emit({{"suite_id", suite_id},
            {"model_id", suite.model_id},
            {"total", pairs.size()},
            {"offset", begin},
            {"pairs", std::move(out)}});
    };
  });

  auto* audit = tests->add_subcommand("audit", "Audit a suite against proxy rules");
  std::string audit_suite, rules_path;
  bool audit_verdicts = false;
  audit->add_option("--suite", audit_suite, "Test suite id (optional with one suite)");
  audit->add_option("--rules", rules_path, "Rule file (JSON)")->required();
  audit->add_flag("--verdicts", audit_verdicts, "Include per-pair verdicts");
  audit->callback([&] {
    action = [&] {
      const auto rules = fairdebug::parse_rules(json::parse(fairdebug::read_file(rules_path)));
      mutate(g, [&](Project& p) {
        std::string suite_id = audit_suite;
        if (suite_id.empty()) {
          if (p.suites().size() != 1) {
            throw Error(ErrorCode::kUsage, "--suite is required");
          }
          suite_id = p.suites().begin()->first;
        }
        const std::string id = p.run_audit(suite_id, rules, g.threads);
        const auto& record = p.audit(id);
        if (csv_format(g)) {
          out() << fairdebug::summary_to_csv(record.result.summary);
          return;
        }
        json body = fairdebug::audit_payload(p.schema(), record);
        if (!audit_verdicts) body.erase("verdicts");
        emit(body);
      });
    };
  });

  auto* edit = tests->add_subcommand("edit", "Re-score a counterfactual with overrides");
  std::string edit_test;
  std::vector<std::string> edit_sets;
  edit->add_option("--test", edit_test, "Test id (suite:pair or pair)")->required();
  edit->add_option("--set", edit_sets, "column=value override (repeatable)");
  edit->callback([&] {
    action = [&] {
      const Project p = load_project(g);
      std::map<std::string, std::string> overrides;
      for (const auto& s : edit_sets) {
        const size_t eq = s.find('=');
        if (eq == std::string::npos) {
          throw Error(ErrorCode::kUsage, "--set expects column=value, got '" + s + "'");
        }
        overrides[s.substr(0, eq)] = s.substr(eq + 1);
      }
      emit(fairdebug::edit_to_json(p.schema(), p.edit(edit_test, overrides)));
    };
  });

  // explain
  auto* explain = app.add_subcommand("explain", "Local explanation of one decision");
  std::string explain_model, explain_test, explain_instance, explain_seed;
  std::string explain_which = "original";
  fairdebug::ExplainOptions explain_options;
  explain->add_option("--model", explain_model, "Model id")->required();
  explain->add_option("--test", explain_test, "Test id to explain");
  explain->add_option("--which", explain_which, "original or counterfactual")
      ->check(CLI::IsMember({"original", "counterfactual"}));
  explain->add_option("--instance", explain_instance, "Instance JSON object (or @file)");
  explain->add_option("--top-k", explain_options.top_k, "Features reported");
  explain->add_option("--samples", explain_options.n_samples, "Perturbation samples");
  explain->add_option("--seed", explain_seed, "Random seed")->required();
  explain->callback([&] {
    action = [&] {
      explain_options.seed = parse_seed(explain_seed);
      explain_options.threads = g.threads;
      if (explain_test.empty() == explain_instance.empty()) {
        throw Error(ErrorCode::kUsage, "give exactly one of --test or --instance");
      }
      mutate(g, [&](Project& p) {
        fairdebug::Instance x;
        std::string instance_id;
        if (!explain_test.empty()) {
          const auto found = p.find_pair(explain_test);
          x = explain_which == "original" ? found.second->original
                                          : found.second->counterfactual;
          instance_id = explain_test;
          if (explain_which == "counterfactual") instance_id += "/counterfactual";
        } else {
          x = fairdebug::instance_from_json(p.schema(),
                                            json::parse(read_text_arg(explain_instance)));
        }
        const std::string id =
            p.explain(explain_model, x, instance_id, explain_options);
        emit(fairdebug::explanation_payload(p, p.explanation(id)));
      });
    };
  });

  // mask
  auto* mask = app.add_subcommand("mask", "Mask a column or some of its values");
  std::string mask_column, mask_values;
  mask->add_option("--column", mask_column, "Column")->required();
  mask->add_option("--values", mask_values, "Comma-separated values (default: all)");
  mask->callback([&] {
    action = [&] {
      mutate(g, [&](Project& p) {
        std::optional<std::vector<std::string>> values;
        if (!mask_values.empty()) values = split_list(mask_values);
        p.mask(mask_column, values);
        emit({{"schema", fairdebug::schema_to_json(p.schema())}});
      });
    };
  });

  // export
  auto* exp = app.add_subcommand("export", "Write every report of the project as one JSON");
  std::string export_out;
  exp->add_option("--out", export_out, "Output file (default stdout)");
  exp->callback([&] {
    action = [&] {
      const Project p = load_project(g);
      json searches = json::object(), reports = json::object(), audits = json::object(),
           explanations = json::object();
      for (const auto& [id, s] : p.searches()) {
        searches[id] = fairdebug::archive_payload(s);
        for (const auto& c : s.result.archive.members()) {
          reports[c.model_id] = p.model_report(c.model_id);
        }
      }
      for (const auto& [id, a] : p.audits()) {
        json body = fairdebug::audit_payload(p.schema(), a);
        body.erase("verdicts");
        audits[id] = std::move(body);
      }
      for (const auto& [id, e] : p.explanations()) {
        explanations[id] = fairdebug::explanation_payload(p, e);
      }
      const json bundle = {{"project", fairdebug::project_summary(p)},
                           {"searches", std::move(searches)},
                           {"reports", std::move(reports)},
                           {"audits", std::move(audits)},
                           {"explanations", std::move(explanations)}};
      if (export_out.empty()) {
        emit(bundle);
      } else {
        fairdebug::write_file_atomic(export_out, bundle.dump(2) + "\n");
      }
    };
  });

  // serve
  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  std::string host = "127.0.0.1", storage;
  int port = 8080;
  size_t workers = 1;
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--port", port, "Port (0 picks a free one)");
  serve->add_option("--storage", storage, "Directory for persisting projects");
  serve->add_option("--workers", workers, "Background job workers");
  serve->callback([&] {
    action = [&] {
      fairdebug::ServiceOptions options;
      if (!storage.empty()) options.storage = storage;
      options.workers = workers;
      options.threads = g.threads;
      fairdebug::Service service(options);
      if (!g.project_dir.empty()) {
        std::cerr << "serving project " << service.adopt(fairdebug::load(g.project_dir))
                  << "\n";
      }
      httplib::Server server;
      service.register_routes(server);
      const int bound = port == 0 ? server.bind_to_any_port(host) : port;
      if (port != 0 && !server.bind_to_port(host, port)) {
        throw Error(ErrorCode::kUsage, "cannot bind " + host + ":" + std::to_string(port));
      }
      if (bound < 0) throw Error(ErrorCode::kUsage, "cannot bind " + host);
      std::cerr << "listening on http://" << host << ":" << bound << "\n";
      server.listen_after_bind();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  try {
    if (action) action();
    return 0;
  } catch (const Error& e) {
    std::cerr << fairdebug::error_body(e.code_name(), e.what()).dump() << "\n";
    return 2;
  } catch (const json::exception& e) {
    std::cerr << fairdebug::error_body("format_error", e.what()).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << fairdebug::error_body("internal_error", e.what()).dump() << "\n";
    return 1;
  }
}
