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

#include "fairdebug/dataset.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "fairdebug/error.h"
#include "synthetic.h"

namespace fairdebug {
namespace {

constexpr char kTiny[] =
    "age,color,sex,label\n"
    "30,red,Male,yes\n"
    "40, blue ,Female,no\n"
    "?,red,Female,yes\n"
    "50,,Male,no\n"
    "20,green,Male,no\n";

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kNotFound;
}

TEST(IngestTest, InfersKindsAndFillsMissing) {
  const Dataset ds = ingest_csv(kTiny, "label", "yes");
  const Schema& s = ds.schema();
  ASSERT_EQ(s.columns.size(), 4u);
  EXPECT_TRUE(s.column("age").is_numeric());
  EXPECT_TRUE(s.column("color").is_categorical());
  EXPECT_EQ(ds.size(), 5u);
  // Median of {30, 40, 50, 20} fills the "?" cell.
  EXPECT_DOUBLE_EQ(std::get<double>(ds.rows()[2][0]), 35.0);
  // Cells are trimmed; empty categorical cells become Unknown.
  EXPECT_EQ(std::get<std::string>(ds.rows()[1][1]), "blue");
  EXPECT_EQ(std::get<std::string>(ds.rows()[3][1]), kUnknownToken);
  EXPECT_TRUE(ds.label_positive(0));
  EXPECT_FALSE(ds.label_positive(1));
  EXPECT_EQ(s.column("age").min(), 20.0);
  EXPECT_EQ(s.column("age").max(), 50.0);
}

TEST(IngestTest, KindOverrideForcesCategorical) {
  const Dataset ds = ingest_csv(kTiny, "label", "yes",
                                parse_kind_overrides(R"({"age": "categorical"})"));
  EXPECT_TRUE(ds.schema().column("age").is_categorical());
}

TEST(IngestTest, RejectsBadInputs) {
  EXPECT_EQ(code_of([] { ingest_csv("a,label\n1,x\n2,y\n3,z\n", "label", "x"); }),
            ErrorCode::kSchema);  // three label values
  EXPECT_EQ(code_of([] { ingest_csv("a,label\n1,x\n2\n", "label", "x"); }),
            ErrorCode::kParse);  // ragged row
  EXPECT_EQ(code_of([] { ingest_csv("", "label", "x"); }), ErrorCode::kSchema);
  EXPECT_EQ(code_of([] { ingest_csv("a,label\n", "label", "x"); }), ErrorCode::kSchema);
  EXPECT_EQ(code_of([] { ingest_csv("a,b\n1,x\n2,y\n", "label", "x"); }),
            ErrorCode::kSchema);  // no label column
  EXPECT_EQ(code_of([] { ingest_csv("a,label\n1,x\n2,y\n", "label", "z"); }),
            ErrorCode::kSchema);  // positive value absent
  EXPECT_EQ(code_of([] {
              ingest_csv("a,label\nq,x\n2,y\n", "label", "x",
                         parse_kind_overrides(R"({"a": "numeric"})"));
            }),
            ErrorCode::kSchema);
}

TEST(IngestTest, RaggedRowMessageNamesTheRow) {
  try {
    ingest_csv("a,b,label\n1,2,x\n1,2,3,y\n", "label", "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("row 2 has 4 fields, expected 3"),
              std::string::npos);
  }
}

TEST(ProtectedTest, NumericProtectedColumnIsRejected) {
  const Dataset ds = ingest_csv(kTiny, "label", "yes");
  EXPECT_EQ(code_of([&] { set_protected(ds, "age", {"20", "30"}); }),
            ErrorCode::kSchema);
  const Dataset p = set_protected(ds, "sex", {"Male", "Female"});
  EXPECT_EQ(p.schema().protected_column, "sex");
  EXPECT_EQ(p.schema().group_of("Female"), 1u);
  EXPECT_FALSE(p.schema().group_of("Other").has_value());
}

TEST(SplitTest, DeterministicDisjointAndRounded) {
  const Dataset ds = synth::small_mixed(101, 3);
  const SplitPair a = split_80_20(ds, 11);
  const SplitPair b = split_80_20(ds, 11);
  const SplitPair c = split_80_20(ds, 12);
  EXPECT_EQ(a.train_indices, b.train_indices);
  EXPECT_NE(a.train_indices, c.train_indices);
  EXPECT_EQ(a.train.size(), 81u);  // round(80.8)
  EXPECT_EQ(a.test.size(), 20u);
  std::set<size_t> all(a.train_indices.begin(), a.train_indices.end());
  all.insert(a.test_indices.begin(), a.test_indices.end());
  EXPECT_EQ(all.size(), 101u);
  EXPECT_EQ(code_of([&] { split_80_20(ds.subset(std::vector<size_t>{0, 1, 2, 3}), 1); }),
            ErrorCode::kSize);
}

TEST(MaskTest, WholeColumnAndValues) {
  const Dataset ds = set_protected(ingest_csv(kTiny, "label", "yes"), "sex",
                                   {"Male", "Female"});
  const Dataset whole = mask(ds, "age", std::nullopt);
  EXPECT_TRUE(whole.schema().column("age").is_categorical());
  EXPECT_EQ(whole.schema().column("age").categories(),
            std::vector<std::string>{std::string(kMaskedToken)});

  const Dataset some = mask(ds, "color", std::vector<std::string>{"red"});
  const auto& cats = some.schema().column("color").categories();
  EXPECT_EQ(std::count(cats.begin(), cats.end(), "red"), 0);
  EXPECT_EQ(std::count(cats.begin(), cats.end(), kMaskedToken), 1);
  // Idempotent.
  EXPECT_EQ(mask(some, "color", std::vector<std::string>{"red"}), some);

  EXPECT_EQ(code_of([&] { mask(ds, "label", std::nullopt); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([&] { mask(ds, "sex", std::nullopt); }), ErrorCode::kUsage);
  EXPECT_EQ(code_of([&] { mask(ds, "color", std::vector<std::string>{"purple"}); }),
            ErrorCode::kUsage);
}

TEST(SchemaJsonTest, RoundTrips) {
  const Dataset ds = synth::small_mixed(50, 1);
  EXPECT_EQ(schema_from_json(schema_to_json(ds.schema())), ds.schema());
}

TEST(InstanceJsonTest, RoundTripsAndChecksKinds) {
  const Dataset ds = ingest_csv(kTiny, "label", "yes");
  const Instance& x = ds.rows()[0];
  EXPECT_EQ(instance_from_json(ds.schema(), instance_to_json(ds.schema(), x)), x);
  EXPECT_EQ(code_of([&] {
              instance_from_json(ds.schema(), nlohmann::json{{"age", "old"}});
            }),
            ErrorCode::kValidity);
}

TEST(ToCsvTest, ReingestsToTheSameRows) {
  const Dataset ds = synth::small_mixed(60, 5);
  const Dataset again = ingest_csv(to_csv(ds), "y", "yes");
  EXPECT_EQ(again.rows(), ds.rows());
}

TEST(FormatNumberTest, ShortestRoundTrip) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(42.0), "42");
  const double third = 1.0 / 3.0;
  EXPECT_EQ(std::stod(format_number(third)), third);
}

}  // namespace
}  // namespace fairdebug
