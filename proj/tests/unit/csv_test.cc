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

#include "fairdebug/csv.h"

#include <gtest/gtest.h>

#include "fairdebug/error.h"

namespace fairdebug::csv {
namespace {

TEST(CsvTest, ParsesQuotedFieldsAndLineEndings) {
  const auto records = parse("a,b,c\r\n1,\"x, y\",\"say \"\"hi\"\"\"\n2,\"multi\nline\",\n");
  ASSERT_EQ(records.size(), 3u);
  EXPECT_EQ(records[0], (Record{"a", "b", "c"}));
  EXPECT_EQ(records[1], (Record{"1", "x, y", "say \"hi\""}));
  EXPECT_EQ(records[2], (Record{"2", "multi\nline", ""}));
}

TEST(CsvTest, StripsByteOrderMark) {
  const auto records = parse("\xEF\xBB\xBFname\nv\n");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0][0], "name");
}

TEST(CsvTest, NoTrailingNewlineStillYieldsLastRecord) {
  const auto records = parse("a,b\n1,2");
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[1], (Record{"1", "2"}));
}

TEST(CsvTest, UnterminatedQuoteIsParseError) {
  try {
    parse("a,b\n1,\"oops\n");
    FAIL() << "expected a parse error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kParse);
  }
}

TEST(CsvTest, FormatRoundTrips) {
  const Record r = {"plain", "with,comma", "with \"quote\"", "line\nbreak", ""};
  const auto parsed = parse(format_record(r) + "\n");
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(parsed[0], r);
  EXPECT_EQ(escape_field("plain"), "plain");
  EXPECT_EQ(escape_field("a,b"), "\"a,b\"");
}

}  // namespace
}  // namespace fairdebug::csv
