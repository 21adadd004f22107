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

#include "fairdebug/fairness.h"

#include "fairdebug/error.h"

namespace fairdebug {

double GroupConfusion::tpr() const {
  return tpr_degenerate() ? 0.0 : static_cast<double>(tp) / (tp + fn);
}

double GroupConfusion::fpr() const {
  return fpr_degenerate() ? 0.0 : static_cast<double>(fp) / (fp + tn);
}

bool FairnessReport::degenerate() const {
  for (size_t g = 0; g < groups.size() && g < 2; ++g) {
    if (groups[g].tpr_degenerate() || groups[g].fpr_degenerate()) return true;
  }
  return false;
}

FairnessReport compute_report(std::span<const Outcome> outcomes,
                              std::span<const std::string> group_names) {
  if (group_names.size() < 2) {
    throw Error(ErrorCode::kMetric, "need two protected groups");
  }
  FairnessReport report;
  for (const auto& name : group_names) {
    report.groups.push_back(GroupConfusion{.group = name});
  }
  size_t correct = 0;
  for (const Outcome& o : outcomes) {
    if (o.label == o.predicted) ++correct;
    if (!o.group) continue;
    GroupConfusion& g = report.groups.at(*o.group);
    if (o.label) {
      ++(o.predicted ? g.tp : g.fn);
    } else {
      ++(o.predicted ? g.fp : g.tn);
    }
  }
  for (size_t g = 0; g < 2; ++g) {
    if (report.groups[g].size() == 0) {
      throw Error(ErrorCode::kMetric, "protected group '" +
                                          report.groups[g].group +
                                          "' has no evaluated rows");
    }
  }
  report.evaluated = outcomes.size();
  report.accuracy = outcomes.empty()
                        ? 0.0
                        : static_cast<double>(correct) / outcomes.size();
  const GroupConfusion& a = report.groups[0];
  const GroupConfusion& b = report.groups[1];
  const double dtpr = a.tpr() - b.tpr();
  const double dfpr = a.fpr() - b.fpr();
  report.eod = dtpr;
  report.aod = 0.5 * (dtpr + dfpr);
  return report;
}

FairnessReport evaluate(const Classifier& model, const Dataset& ds,
                        std::string model_id, std::string split_id) {
  const Schema& schema = ds.schema();
  const size_t prot = schema.protected_index();
  std::vector<Outcome> outcomes(ds.size());
  for (size_t r = 0; r < ds.size(); ++r) {
    const Instance& x = ds.rows()[r];
    Outcome& o = outcomes[r];
    o.label = ds.label_positive(r);
    o.predicted = model.predict(x);
    if (const auto* s = std::get_if<std::string>(&x[prot])) {
      o.group = schema.group_of(*s);
    }
  }
  FairnessReport report = compute_report(outcomes, schema.protected_groups);
  report.model_id = std::move(model_id);
  report.split_id = std::move(split_id);
  return report;
}

void to_json(nlohmann::json& j, const FairnessReport& report) {
  nlohmann::json groups = nlohmann::json::array();
  for (const auto& g : report.groups) {
    groups.push_back({{"group", g.group},
                      {"size", g.size()},
                      {"tp", g.tp},
                      {"fp", g.fp},
                      {"tn", g.tn},
                      {"fn", g.fn},
                      {"tpr", g.tpr()},
                      {"fpr", g.fpr()},
                      {"tpr_degenerate", g.tpr_degenerate()},
                      {"fpr_degenerate", g.fpr_degenerate()}});
  }
  j = {{"model_id", report.model_id},
       {"split_id", report.split_id},
       {"evaluated", report.evaluated},
       {"accuracy", report.accuracy},
       {"eod", report.eod},
       {"aod", report.aod},
       {"degenerate", report.degenerate()},
       {"groups", std::move(groups)}};
}

FairnessReport fairness_report_from_json(const nlohmann::json& j) {
  try {
    FairnessReport r;
    r.model_id = j.at("model_id").get<std::string>();
    r.split_id = j.at("split_id").get<std::string>();
    r.evaluated = j.at("evaluated").get<size_t>();
    r.accuracy = j.at("accuracy").get<double>();
    r.eod = j.at("eod").get<double>();
    r.aod = j.at("aod").get<double>();
    for (const auto& jg : j.at("groups")) {
      GroupConfusion g;
      g.group = jg.at("group").get<std::string>();
      g.tp = jg.at("tp").get<size_t>();
      g.fp = jg.at("fp").get<size_t>();
      g.tn = jg.at("tn").get<size_t>();
      g.fn = jg.at("fn").get<size_t>();
      r.groups.push_back(std::move(g));
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad report JSON: ") + e.what());
  }
}

}  // namespace fairdebug
