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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fairdebug/error.h"
#include "synthetic.h"

namespace fairdebug {
namespace {

namespace fs = std::filesystem;

class ProjectTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("fairdebug_project_" +
            std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static Project full_project() {
    Project p("p-test", "2026-01-01T00:00:00Z", synth::small_mixed(400, 1));
    p.make_split(7);
    SearchConfig cfg;
    cfg.budget = 10;
    cfg.population_size = 5;
    cfg.seed = 3;
    cfg.threads = 1;
    const std::string s = p.run_search(cfg);
    const std::string m = p.search(s).result.archive.members().at(0).model_id;
    const std::string suite = p.generate_tests(m, 200, 5, 1);
    p.tests_from_split(m);
    p.run_audit(suite, {{"A", "B", {{"size", "S", "L"}}}, {"B", "A", {{"size", "L", "S"}}}},
                1);
    ExplainOptions o;
    o.seed = 1;
    o.top_k = 3;
    o.n_samples = 100;
    o.threads = 1;
    p.explain(m, p.data().rows()[0], "row-0", o);
    return p;
  }

  fs::path dir_;
};

TEST_F(ProjectTest, SaveLoadRoundTrip) {
  const Project p = full_project();
  save(p, dir_);
  const Project back = load(dir_);
  EXPECT_TRUE(back == p);
  EXPECT_EQ(manifest_text(back), manifest_text(p));
  for (const auto& [id, model] : p.models()) {
    EXPECT_EQ(back.model_report(id), p.model_report(id));
  }
  ASSERT_EQ(back.searches().size(), 1u);
  const auto& a = back.searches().begin()->second.result;
  const auto& b = p.searches().begin()->second.result;
  EXPECT_EQ(a.evaluated, b.evaluated);
  EXPECT_EQ(a.archive.members(), b.archive.members());
  for (const auto& [id, suite] : p.suites()) {
    EXPECT_EQ(back.suite(id).pairs, suite.pairs);
  }
}

TEST_F(ProjectTest, ResaveIsByteIdentical) {
  const Project p = full_project();
  save(p, dir_);
  const std::string first = read_file(dir_ / "manifest.json");
  save(load(dir_), dir_ / "again");
  EXPECT_EQ(read_file(dir_ / "again" / "manifest.json"), first);
  // Same inputs from scratch give the same ids.
  EXPECT_EQ(manifest_text(full_project()), first);
}

TEST_F(ProjectTest, CorruptArtifactIsNamed) {
  const Project p = full_project();
  save(p, dir_);
  const auto manifest = nlohmann::json::parse(read_file(dir_ / "manifest.json"));
  std::string path, id;
  for (const auto& a : manifest.at("artifacts")) {
    if (a.at("kind") == "model") {
      path = a.at("path");
      id = a.at("id");
      break;
    }
  }
  ASSERT_FALSE(path.empty());
  const std::string text = read_file(dir_ / path);
  std::ofstream(dir_ / path, std::ios::trunc) << text.substr(0, text.size() / 2);
  try {
    load(dir_);
    FAIL() << "expected an integrity error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIntegrity);
    EXPECT_NE(std::string(e.what()).find(id), std::string::npos) << e.what();
  }
}

TEST_F(ProjectTest, MissingManifestIsFormatError) {
  fs::create_directories(dir_);
  try {
    load(dir_);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kFormat);
  }
}

TEST_F(ProjectTest, SaveDropsUnreferencedFiles) {
  Project p = full_project();
  save(p, dir_);
  p.set_protected("group", {"B", "A"});
  save(p, dir_);
  size_t files = 0;
  for (const auto& e : fs::recursive_directory_iterator(dir_)) {
    if (e.is_regular_file() && e.path().filename() != "manifest.json") ++files;
  }
  // Dataset and split only.
  EXPECT_EQ(files, 2u);
  EXPECT_TRUE(load(dir_) == p);
}

TEST_F(ProjectTest, ProtectClearsDerivedButKeepsSplit) {
  Project p = full_project();
  const uint64_t rev = p.revision();
  p.set_protected("group", {"B", "A"});
  EXPECT_TRUE(p.models().empty());
  EXPECT_TRUE(p.suites().empty());
  EXPECT_TRUE(p.searches().empty());
  EXPECT_TRUE(p.has_split());
  EXPECT_GT(p.revision(), rev);
  EXPECT_EQ(p.split().train.schema().protected_groups[0], "B");
  EXPECT_NE(p.split_id(), "");
}

TEST_F(ProjectTest, MergeDerivedDetectsConcurrentChange) {
  Project p("p-test", "t", synth::small_mixed(200, 2));
  p.make_split(1);
  Project copy = p;
  SearchConfig cfg;
  cfg.budget = 4;
  cfg.population_size = 2;
  cfg.threads = 1;
  const std::string s = copy.run_search(cfg);
  Project target = p;
  target.merge_derived(copy);
  EXPECT_NO_THROW(target.search(s));
  p.mask("color", std::nullopt);
  try {
    p.merge_derived(copy);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUsage);
  }
}

TEST_F(ProjectTest, UnknownIdsAreNotFound) {
  const Project p = full_project();
  try {
    p.model("m-nope");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
  EXPECT_THROW(p.suite("ts-nope"), Error);
  EXPECT_THROW(p.find_pair("nope:nope"), Error);
  EXPECT_THROW(p.find_pair("t-nope"), Error);
}

TEST_F(ProjectTest, PairReferences) {
  const Project p = full_project();
  const TestSuite* generated = nullptr;
  for (const auto& [id, s] : p.suites()) {
    if (s.source == "generated") generated = &s;
  }
  ASSERT_NE(generated, nullptr);
  const TestPair& first = generated->pairs[0];
  const auto [suite, pair] = p.find_pair(generated->id + ":" + first.id);
  ASSERT_NE(pair, nullptr);
  EXPECT_EQ(pair->id, first.id);
  EXPECT_EQ(p.find_pair(first.id).second->id, first.id);
  const CounterfactualEdit e = p.edit(first.id, {});
  EXPECT_EQ(e.instance, first.counterfactual);
}

TEST_F(ProjectTest, LockIsExclusive) {
  fs::create_directories(dir_);
  {
    ProjectLock lock(dir_);
    try {
      ProjectLock second(dir_);
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), ErrorCode::kUsage);
    }
  }
  EXPECT_NO_THROW(ProjectLock again(dir_));
}

TEST(FileTest, ReadMissingIsNotFound) {
  try {
    read_file("/nonexistent/fairdebug/file");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotFound);
  }
}

}  // namespace
}  // namespace fairdebug
