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

#include "fairdebug/payloads.h"

#include "fairdebug/stats.h"

namespace fairdebug {

using nlohmann::json;

json project_summary(const Project& p) {
  json split = nullptr;
  if (p.has_split()) {
    split = {{"id", p.split_id()},
             {"seed", p.split().seed},
             {"train", p.split().train.size()},
             {"test", p.split().test.size()}};
  }
  json suites = json::array();
  for (const auto& [id, s] : p.suites()) {
    suites.push_back({{"id", id},
                      {"model_id", s.model_id},
                      {"source", s.source},
                      {"seed", s.seed},
                      {"pairs", s.pairs.size()}});
  }
  json searches = json::array(), models = json::array(), audits = json::array(),
       explanations = json::array();
  for (const auto& [id, _] : p.searches()) searches.push_back(id);
  for (const auto& [id, _] : p.models()) models.push_back(id);
  for (const auto& [id, _] : p.audits()) audits.push_back(id);
  for (const auto& [id, _] : p.explanations()) explanations.push_back(id);
  return {{"id", p.id()},
          {"created", p.created()},
          {"rows", p.data().size()},
          {"schema", schema_to_json(p.schema())},
          {"split", std::move(split)},
          {"seeds", p.seeds()},
          {"searches", std::move(searches)},
          {"models", std::move(models)},
          {"suites", std::move(suites)},
          {"audits", std::move(audits)},
          {"explanations", std::move(explanations)}};
}

json archive_payload(const SearchRecord& s) {
  json pareto = json::array();
  for (const auto& c : s.result.archive.members()) pareto.push_back(c.id);
  json failures = json::array();
  for (const auto& f : s.result.failures) {
    failures.push_back({{"eval_index", f.eval_index},
                        {"hyperparams", f.hp},
                        {"error", f.error}});
  }
  return {{"search_id", s.id},
          {"split_id", s.split_id},
          {"config", s.result.config},
          {"best_accuracy", s.result.archive.best_accuracy()},
          {"accuracy_floor", s.result.archive.accuracy_floor()},
          {"generations", s.result.generations},
          {"candidates",
           archive_to_scatter(s.result.archive, s.result.evaluated)},
          {"pareto", std::move(pareto)},
          {"failures", std::move(failures)}};
}

json audit_payload(const Schema& schema, const AuditRecord& a) {
  json verdicts = json::array();
  for (const auto& v : a.result.verdicts) verdicts.push_back(verdict_to_json(schema, v));
  return {{"audit_id", a.id},
          {"suite_id", a.suite_id},
          {"summary", a.result.summary},
          {"verdicts", std::move(verdicts)}};
}

json explanation_payload(const Project& p, const ExplanationRecord& r) {
  json out = {{"explanation_id", r.id},
              {"model_id", r.model_id},
              {"explanation", r.explanation}};
  out["story"] = p.schema().has_protected()
                     ? json(explanation_story(r.explanation, interactions(p.data())))
                     : json(nullptr);
  return out;
}

}  // namespace fairdebug
