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

#include "fairdebug/project.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "fairdebug/csv.h"
#include "fairdebug/error.h"
#include "fairdebug/hash.h"

namespace fairdebug {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string short_hash(std::string_view text, size_t chars = 12) {
  return sha256_hex(text).substr(0, chars);
}

template <typename Map>
const typename Map::mapped_type& lookup(const Map& map, std::string_view id,
                                        const char* kind) {
  const auto it = map.find(std::string(id));
  if (it == map.end()) {
    throw Error(ErrorCode::kNotFound,
                std::string(kind) + " '" + std::string(id) + "' not found");
  }
  return it->second;
}

Dataset dataset_from_csv(const Schema& schema, std::string_view text) {
  const auto records = csv::parse(text);
  if (records.empty()) throw Error(ErrorCode::kFormat, "dataset file is empty");
  const size_t width = schema.columns.size();
  if (records[0].size() != width) {
    throw Error(ErrorCode::kFormat, "dataset header does not match the schema");
  }
  for (size_t c = 0; c < width; ++c) {
    if (records[0][c] != schema.columns[c].name()) {
      throw Error(ErrorCode::kFormat, "dataset header does not match the schema");
    }
  }
  std::vector<Instance> rows;
  rows.reserve(records.size() - 1);
  for (size_t r = 1; r < records.size(); ++r) {
    const auto& rec = records[r];
    if (rec.size() != width) {
      throw Error(ErrorCode::kFormat, "dataset row " + std::to_string(r) +
                                          " has the wrong width");
    }
    Instance x;
    x.values.resize(width);
    for (size_t c = 0; c < width; ++c) {
      if (schema.columns[c].is_categorical()) {
        x[c] = rec[c];
        continue;
      }
      double v = 0.0;
      const char* end = rec[c].data() + rec[c].size();
      const auto res = std::from_chars(rec[c].data(), end, v);
      if (res.ec != std::errc() || res.ptr != end) {
        throw Error(ErrorCode::kFormat, "dataset row " + std::to_string(r) +
                                            " has a bad number");
      }
      x[c] = v;
    }
    rows.push_back(std::move(x));
  }
  return Dataset(schema, std::move(rows));
}

json split_to_json(const SplitPair& split) {
  return {{"seed", split.seed},
          {"train_indices", split.train_indices},
          {"test_indices", split.test_indices}};
}

json suite_to_json(const TestSuite& suite) {
  return {{"model_id", suite.model_id},
          {"source", suite.source},
          {"seed", suite.seed},
          {"pairs", suite.pairs.size()}};
}

json audit_to_json(const Schema& schema, const AuditRecord& a) {
  json verdicts = json::array();
  for (const auto& v : a.result.verdicts) verdicts.push_back(verdict_to_json(schema, v));
  return {{"suite_id", a.suite_id},
          {"rules", a.rules},
          {"summary", a.result.summary},
          {"verdicts", std::move(verdicts)}};
}

AuditRecord audit_from_json(const Schema& schema, const json& j, std::string id) {
  AuditRecord a;
  a.id = std::move(id);
  a.suite_id = j.at("suite_id").get<std::string>();
  a.rules = parse_rules(j.at("rules"));
  for (const auto& jv : j.at("verdicts")) {
    AuditVerdict v;
    v.pair_id = jv.at("pair_id").get<std::string>();
    v.raw_is_id = jv.at("raw_is_id").get<bool>();
    v.adjusted_is_id = jv.at("adjusted_is_id").get<bool>();
    v.label = audit_label(v.raw_is_id, v.adjusted_is_id);
    v.proba_adjusted = jv.at("proba_adjusted").get<double>();
    v.adjusted_columns = jv.at("adjusted_columns").get<std::vector<std::string>>();
    v.adjusted_counterfactual =
        instance_from_json(schema, jv.at("adjusted_counterfactual"));
    a.result.verdicts.push_back(std::move(v));
  }
  AuditSummary& s = a.result.summary;
  const json& js = j.at("summary");
  s.pairs = js.at("pairs").get<size_t>();
  s.tp = js.at("counts").at("TP").get<size_t>();
  s.fp = js.at("counts").at("FP").get<size_t>();
  s.tn = js.at("counts").at("TN").get<size_t>();
  s.fn = js.at("counts").at("FN").get<size_t>();
  s.tp_rate = js.at("rates").at("TP").get<double>();
  s.fp_rate = js.at("rates").at("FP").get<double>();
  s.tn_rate = js.at("rates").at("TN").get<double>();
  s.fn_rate = js.at("rates").at("FN").get<double>();
  return a;
}

}  // namespace

Project::Project(std::string id, std::string created, Dataset data)
    : id_(std::move(id)), created_(std::move(created)), data_(std::move(data)) {}

void Project::clear_derived() {
  ++revision_;
  searches_.clear();
  models_.clear();
  suites_.clear();
  audits_.clear();
  explanations_.clear();
  for (auto it = seeds_.begin(); it != seeds_.end();) {
    it = it->first == "split" ? std::next(it) : seeds_.erase(it);
  }
}

void Project::rebuild_split() {
  if (!split_) return;
  split_ = split_from_indices(data_, split_->seed, split_->train_indices,
                              split_->test_indices);
}

void Project::set_protected(std::string_view column,
                            std::vector<std::string> groups) {
  data_ = fairdebug::set_protected(data_, column, std::move(groups));
  clear_derived();
  rebuild_split();
}

void Project::mask(std::string_view column,
                   const std::optional<std::vector<std::string>>& values) {
  data_ = fairdebug::mask(data_, column, values);
  clear_derived();
  rebuild_split();
}

const SplitPair& Project::make_split(uint64_t seed) {
  if (split_ && split_->seed == seed) return *split_;
  split_ = split_80_20(data_, seed);
  split_id_ = "split-" + short_hash(split_to_json(*split_).dump());
  seeds_["split"] = seed;
  clear_derived();
  return *split_;
}

const SplitPair& Project::split() const {
  if (!split_) throw Error(ErrorCode::kUsage, "project has no split yet");
  return *split_;
}

const Dataset& Project::train_data() const { return split().train; }

std::string Project::run_search(const SearchConfig& cfg,
                                const SearchObserver& observer) {
  if (!schema().has_protected()) {
    throw Error(ErrorCode::kUsage, "set a protected attribute before searching");
  }
  const SplitPair& s = split();
  json key = cfg;
  key["split_id"] = split_id_;
  const std::string id = "s-" + short_hash(key.dump());
  SearchRun run = fairdebug::search(s, cfg, observer);
  for (auto& [model_id, model] : run.models) models_.emplace(model_id, std::move(model));
  searches_[id] = SearchRecord{id, split_id_, std::move(run.result)};
  seeds_["search:" + id] = cfg.seed;
  return id;
}

const SearchRecord& Project::search(std::string_view id) const {
  return lookup(searches_, id, "search");
}

const TrainedModel& Project::model(std::string_view id) const {
  return lookup(models_, id, "model");
}

FairnessReport Project::model_report(std::string_view model_id) const {
  return evaluate(model(model_id), split().test, std::string(model_id), split_id_);
}

std::string Project::generate_tests(std::string_view model_id, size_t n,
                                    uint64_t seed, size_t threads) {
  const TrainedModel& m = model(model_id);
  const std::string id =
      "ts-" + short_hash(json{{"model", model_id}, {"n", n}, {"seed", seed},
                              {"source", "generated"}}.dump());
  TestSuite suite{id, std::string(model_id), "generated", seed,
                  generate(m, data_, n, seed, threads)};
  suites_[id] = std::move(suite);
  seeds_["tests:" + id] = seed;
  return id;
}

std::string Project::tests_from_split(std::string_view model_id) {
  const TrainedModel& m = model(model_id);
  const std::string id =
      "ts-" + short_hash(json{{"model", model_id}, {"split", split_id_},
                              {"source", "test_split"}}.dump());
  suites_[id] = TestSuite{id, std::string(model_id), "test_split", 0,
                          pairs_from_dataset(m, split().test, 0)};
  return id;
}

const TestSuite& Project::suite(std::string_view id) const {
  return lookup(suites_, id, "test suite");
}

std::pair<const TestSuite*, const TestPair*> Project::find_pair(
    std::string_view ref) const {
  const size_t colon = ref.find(':');
  std::pair<const TestSuite*, const TestPair*> found{nullptr, nullptr};
  auto scan = [&](const TestSuite& s, std::string_view pair) {
    for (const auto& p : s.pairs) {
      if (p.id != pair) continue;
      if (found.second) {
        throw Error(ErrorCode::kUsage, "test id '" + std::string(ref) +
                                           "' is ambiguous; use suite:pair");
      }
      found = {&s, &p};
    }
  };
  if (colon != std::string_view::npos) {
    scan(suite(ref.substr(0, colon)), ref.substr(colon + 1));
  } else {
    for (const auto& [id, s] : suites_) scan(s, ref);
  }
  if (!found.second) {
    throw Error(ErrorCode::kNotFound, "test '" + std::string(ref) + "' not found");
  }
  return found;
}

std::string Project::run_audit(std::string_view suite_id,
                               std::vector<ProxyRule> rules, size_t threads) {
  const TestSuite& s = suite(suite_id);
  const std::string id =
      "a-" + short_hash(json{{"suite", suite_id}, {"rules", rules}}.dump());
  AuditRecord record{id, std::string(suite_id), std::move(rules), {}};
  record.result = fairdebug::audit(s.pairs, record.rules, model(s.model_id), schema(), threads);
  audits_[id] = std::move(record);
  return id;
}

const AuditRecord& Project::audit(std::string_view id) const {
  return lookup(audits_, id, "audit");
}

CounterfactualEdit Project::edit(
    std::string_view pair_ref,
    const std::map<std::string, std::string>& overrides) const {
  const auto [s, pair] = find_pair(pair_ref);
  return edit_counterfactual(*pair, overrides, model(s->model_id), schema());
}

std::string Project::explain(std::string_view model_id, const Instance& x,
                             std::string instance_id,
                             const ExplainOptions& options) {
  const TrainedModel& m = model(model_id);
  const std::string id =
      "e-" + short_hash(json{{"model", model_id},
                             {"instance", instance_to_json(schema(), x)},
                             {"instance_id", instance_id},
                             {"top_k", options.top_k},
                             {"n_samples", options.n_samples},
                             {"seed", options.seed}}.dump());
  ExplanationRecord record{id, std::string(model_id),
                           fairdebug::explain(m, x, train_data(), options,
                                              std::move(instance_id))};
  explanations_[id] = std::move(record);
  seeds_["explain:" + id] = options.seed;
  return id;
}

const ExplanationRecord& Project::explanation(std::string_view id) const {
  return lookup(explanations_, id, "explanation");
}

void Project::merge_derived(const Project& snapshot) {
  if (snapshot.revision_ != revision_ || snapshot.split_id_ != split_id_) {
    throw Error(ErrorCode::kUsage,
                "project changed while the job was running; results discarded");
  }
  searches_.insert(snapshot.searches_.begin(), snapshot.searches_.end());
  models_.insert(snapshot.models_.begin(), snapshot.models_.end());
  suites_.insert(snapshot.suites_.begin(), snapshot.suites_.end());
  audits_.insert(snapshot.audits_.begin(), snapshot.audits_.end());
  explanations_.insert(snapshot.explanations_.begin(),
                       snapshot.explanations_.end());
  seeds_.insert(snapshot.seeds_.begin(), snapshot.seeds_.end());
}

bool Project::operator==(const Project& other) const {
  return manifest_text(*this) == manifest_text(other) && data_ == other.data_;
}

// Persistence.

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const fs::path& path, std::string_view data) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kFormat, "cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!out) throw Error(ErrorCode::kFormat, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

struct Artifact {
  std::string kind;
  std::string id;
  std::string path;  // relative to the project directory
  std::string sha256;
  json meta;
  std::string content;
};

Artifact make_artifact(std::string kind, std::string id, const std::string& dir,
                       const std::string& ext, std::string content,
                       json meta = json::object()) {
  Artifact a;
  a.kind = std::move(kind);
  a.id = std::move(id);
  a.sha256 = sha256_hex(content);
  a.path = dir + "/" + a.sha256 + "." + ext;
  a.meta = std::move(meta);
  a.content = std::move(content);
  return a;
}

std::vector<Artifact> collect_artifacts(const Project& p) {
  std::vector<Artifact> out;
  out.push_back(make_artifact("dataset", "data", "data", "csv", to_csv(p.data())));
  if (p.has_split()) {
    out.push_back(make_artifact("split", p.split_id(), "data", "json",
                                split_to_json(p.split()).dump()));
  }
  for (const auto& [id, m] : p.models()) {
    out.push_back(make_artifact("model", id, "models", "json", m.serialize()));
  }
  for (const auto& [id, s] : p.searches()) {
    out.push_back(make_artifact("search", id, "models", "json",
                                json(s.result).dump(),
                                {{"split_id", s.split_id}}));
  }
  for (const auto& [id, s] : p.suites()) {
    out.push_back(make_artifact("tests", id, "tests", "jsonl",
                                pairs_to_jsonl(p.schema(), s.pairs),
                                suite_to_json(s)));
  }
  for (const auto& [id, a] : p.audits()) {
    out.push_back(make_artifact("audit", id, "tests", "json",
                                audit_to_json(p.schema(), a).dump(),
                                {{"suite_id", a.suite_id}}));
  }
  for (const auto& [id, e] : p.explanations()) {
    out.push_back(make_artifact("explanation", id, "explanations", "json",
                                json(e.explanation).dump(),
                                {{"model_id", e.model_id}}));
  }
  return out;
}

json manifest_json(const Project& p, const std::vector<Artifact>& artifacts) {
  json index = json::array();
  for (const auto& a : artifacts) {
    index.push_back({{"kind", a.kind},
                     {"id", a.id},
                     {"path", a.path},
                     {"sha256", a.sha256},
                     {"meta", a.meta}});
  }
  return {{"format_version", kManifestVersion},
          {"id", p.id()},
          {"created", p.created()},
          {"schema", schema_to_json(p.schema())},
          {"seeds", p.seeds()},
          {"artifacts", std::move(index)}};
}

const char* const kArtifactDirs[] = {"data", "models", "tests", "explanations"};

}  // namespace

std::string manifest_text(const Project& project) {
  return manifest_json(project, collect_artifacts(project)).dump(2) + "\n";
}

void save(const Project& project, const fs::path& dir) {
  fs::create_directories(dir);
  for (const char* sub : kArtifactDirs) fs::create_directories(dir / sub);
  const auto artifacts = collect_artifacts(project);
  std::set<fs::path> referenced;
  for (const auto& a : artifacts) {
    const fs::path path = dir / a.path;
    referenced.insert(path);
    // Content addressed: an existing file with a verifying hash is reused.
    if (fs::exists(path) && sha256_hex(read_file(path)) == a.sha256) continue;
    write_file_atomic(path, a.content);
  }
  write_file_atomic(dir / "manifest.json",
                    manifest_json(project, artifacts).dump(2) + "\n");
  for (const char* sub : kArtifactDirs) {
    for (const auto& entry : fs::directory_iterator(dir / sub)) {
      if (entry.is_regular_file() && !referenced.count(entry.path())) {
        fs::remove(entry.path());
      }
    }
  }
}

Project load(const fs::path& dir) {
  const fs::path manifest_path = dir / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw Error(ErrorCode::kFormat, "no manifest.json in " + dir.string());
  }
  json manifest;
  try {
    manifest = json::parse(read_file(manifest_path));
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("bad manifest: ") + e.what());
  }
  try {
    if (manifest.at("format_version").get<int>() != kManifestVersion) {
      throw Error(ErrorCode::kFormat, "unsupported manifest version");
    }
    const Schema schema = schema_from_json(manifest.at("schema"));

    auto read_verified = [&](const json& a) {
      const std::string rel = a.at("path").get<std::string>();
      const std::string name =
          a.at("kind").get<std::string>() + " '" + a.at("id").get<std::string>() +
          "' (" + rel + ")";
      std::string content;
      try {
        content = read_file(dir / rel);
      } catch (const Error&) {
        throw Error(ErrorCode::kIntegrity, "missing artifact " + name);
      }
      if (sha256_hex(content) != a.at("sha256").get<std::string>()) {
        throw Error(ErrorCode::kIntegrity, "hash mismatch for artifact " + name);
      }
      return content;
    };

    Project p;
    p.id_ = manifest.at("id").get<std::string>();
    p.created_ = manifest.at("created").get<std::string>();
    p.seeds_ = manifest.at("seeds").get<std::map<std::string, uint64_t>>();
    bool have_data = false;
    // The dataset comes first in the index; everything else depends on it.
    for (const auto& a : manifest.at("artifacts")) {
      const std::string kind = a.at("kind").get<std::string>();
      const std::string id = a.at("id").get<std::string>();
      const std::string content = read_verified(a);
      if (kind == "dataset") {
        p.data_ = dataset_from_csv(schema, content);
        have_data = true;
        continue;
      }
      if (!have_data) throw Error(ErrorCode::kFormat, "dataset must come first");
      if (kind == "split") {
        const json j = json::parse(content);
        p.split_ = split_from_indices(
            p.data_, j.at("seed").get<uint64_t>(),
            j.at("train_indices").get<std::vector<size_t>>(),
            j.at("test_indices").get<std::vector<size_t>>());
        p.split_id_ = id;
      } else if (kind == "model") {
        p.models_.emplace(id, TrainedModel::from_json(json::parse(content)));
      } else if (kind == "search") {
        p.searches_[id] = SearchRecord{
            id, a.at("meta").at("split_id").get<std::string>(),
            search_result_from_json(json::parse(content))};
      } else if (kind == "tests") {
        const json& meta = a.at("meta");
        p.suites_[id] = TestSuite{id, meta.at("model_id").get<std::string>(),
                                  meta.at("source").get<std::string>(),
                                  meta.at("seed").get<uint64_t>(),
                                  pairs_from_jsonl(schema, content)};
      } else if (kind == "audit") {
        p.audits_[id] = audit_from_json(schema, json::parse(content), id);
      } else if (kind == "explanation") {
        p.explanations_[id] = ExplanationRecord{
            id, a.at("meta").at("model_id").get<std::string>(),
            explanation_from_json(json::parse(content))};
      } else {
        throw Error(ErrorCode::kFormat, "unknown artifact kind '" + kind + "'");
      }
    }
    if (!have_data) throw Error(ErrorCode::kFormat, "manifest lists no dataset");
    return p;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad manifest: ") + e.what());
  }
}

ProjectLock::ProjectLock(const fs::path& dir) {
  fs::create_directories(dir);
  const std::string path = (dir / ".lock").string();
  fd_ = ::open(path.c_str(), O_RDWR | O_CREAT, 0644);
  if (fd_ < 0) throw Error(ErrorCode::kUsage, "cannot open lock file " + path);
  if (::flock(fd_, LOCK_EX | LOCK_NB) != 0) {
    ::close(fd_);
    fd_ = -1;
    throw Error(ErrorCode::kUsage,
                "project " + dir.string() + " is locked by another writer");
  }
}

ProjectLock::~ProjectLock() {
  if (fd_ >= 0) {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
}

}  // namespace fairdebug
