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

#ifndef FAIRDEBUG_PROJECT_H_
#define FAIRDEBUG_PROJECT_H_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairdebug/counterfactual.h"
#include "fairdebug/dataset.h"
#include "fairdebug/explainer.h"
#include "fairdebug/fairness.h"
#include "fairdebug/learners.h"
#include "fairdebug/pareto.h"

namespace fairdebug {

inline constexpr int kManifestVersion = 1;

struct SearchRecord {
  std::string id;
  std::string split_id;
  SearchResult result;
};

struct TestSuite {
  std::string id;
  std::string model_id;
  std::string source;  // "generated" or "test_split"
  uint64_t seed = 0;
  std::vector<TestPair> pairs;
};

struct AuditRecord {
  std::string id;
  std::string suite_id;
  std::vector<ProxyRule> rules;
  AuditResult result;
};

struct ExplanationRecord {
  std::string id;
  std::string model_id;
  Explanation explanation;
};

using ProgressFn = std::function<void(size_t done, size_t total)>;

// A debugging session. All pipeline stages go through these methods so the
// CLI and the service produce the same artifacts for the same inputs. Ids of
// derived artifacts are content hashes of their inputs.
class Project {
 public:
  Project() = default;
  Project(std::string id, std::string created, Dataset data);

  const std::string& id() const { return id_; }
  const std::string& created() const { return created_; }
  const Dataset& data() const { return data_; }
  const Schema& schema() const { return data_.schema(); }
  const std::map<std::string, uint64_t>& seeds() const { return seeds_; }

  // Both reset every derived artifact except the split (models trained on the
  // old representation or groups are no longer meaningful).
  void set_protected(std::string_view column, std::vector<std::string> groups);
  void mask(std::string_view column,
            const std::optional<std::vector<std::string>>& values);

  const SplitPair& make_split(uint64_t seed);
  bool has_split() const { return split_.has_value(); }
  const SplitPair& split() const;
  const std::string& split_id() const { return split_id_; }

  // Returns the search id. Every evaluated model is kept.
  std::string run_search(const SearchConfig& cfg,
                         const SearchObserver& observer = {});
  const SearchRecord& search(std::string_view id) const;
  const std::map<std::string, SearchRecord>& searches() const { return searches_; }

  const TrainedModel& model(std::string_view id) const;
  const std::map<std::string, TrainedModel>& models() const { return models_; }
  // Fairness on the test split.
  FairnessReport model_report(std::string_view model_id) const;

  // Random pairs over the dataset's observed domain.
  std::string generate_tests(std::string_view model_id, size_t n, uint64_t seed,
                             size_t threads = 0);
  // Labeled pairs built from the test split.
  std::string tests_from_split(std::string_view model_id);
  const TestSuite& suite(std::string_view id) const;
  const std::map<std::string, TestSuite>& suites() const { return suites_; }
  // "suite:pair", or a bare pair id when it is unambiguous.
  std::pair<const TestSuite*, const TestPair*> find_pair(std::string_view ref) const;

  std::string run_audit(std::string_view suite_id, std::vector<ProxyRule> rules,
                        size_t threads = 0);
  const AuditRecord& audit(std::string_view id) const;
  const std::map<std::string, AuditRecord>& audits() const { return audits_; }

  CounterfactualEdit edit(std::string_view pair_ref,
                          const std::map<std::string, std::string>& overrides) const;

  // Explains `x` against the training split.
  std::string explain(std::string_view model_id, const Instance& x,
                      std::string instance_id, const ExplainOptions& options);
  const ExplanationRecord& explanation(std::string_view id) const;
  const std::map<std::string, ExplanationRecord>& explanations() const {
    return explanations_;
  }

  // Bumped whenever derived artifacts are invalidated.
  uint64_t revision() const { return revision_; }
  // Copies derived artifacts computed on a copy of this project back into
  // it. Throws Error(kUsage) when this project changed in the meantime.
  void merge_derived(const Project& snapshot);

  bool operator==(const Project& other) const;

 private:
  friend void save(const Project&, const std::filesystem::path&);
  friend Project load(const std::filesystem::path&);

  void clear_derived();
  void rebuild_split();
  const Dataset& train_data() const;

  std::string id_;
  std::string created_;
  Dataset data_;
  std::map<std::string, uint64_t> seeds_;
  std::optional<SplitPair> split_;
  std::string split_id_;
  std::map<std::string, SearchRecord> searches_;
  std::map<std::string, TrainedModel> models_;
  std::map<std::string, TestSuite> suites_;
  std::map<std::string, AuditRecord> audits_;
  std::map<std::string, ExplanationRecord> explanations_;
  uint64_t revision_ = 0;
};

// Directory layout:
//   manifest.json              canonical JSON, sorted keys
//   data/<sha256>.csv          dataset rows
//   data/<sha256>.json         split indices
//   models/<sha256>.json       trained models and search archives
//   tests/<sha256>.jsonl       test suites
//   tests/<sha256>.json        audits
//   explanations/<sha256>.json
// Files are content addressed; unreferenced artifact files are removed.
void save(const Project& project, const std::filesystem::path& dir);

// Throws Error(kFormat) when the manifest is missing or malformed and
// Error(kIntegrity) naming the artifact whose hash does not verify.
Project load(const std::filesystem::path& dir);

std::string manifest_text(const Project& project);

// Exclusive advisory lock on <dir>/.lock, released on destruction. Throws
// Error(kUsage) if another writer holds it.
class ProjectLock {
 public:
  explicit ProjectLock(const std::filesystem::path& dir);
  ~ProjectLock();
  ProjectLock(const ProjectLock&) = delete;
  ProjectLock& operator=(const ProjectLock&) = delete;

 private:
  int fd_ = -1;
};

// Reads a whole file; Error(kNotFound) when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file_atomic(const std::filesystem::path& path, std::string_view data);

}  // namespace fairdebug

#endif  // FAIRDEBUG_PROJECT_H_
