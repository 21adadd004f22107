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

#ifndef FAIRDEBUG_CSV_H_
#define FAIRDEBUG_CSV_H_

#include <string>
#include <string_view>
#include <vector>

namespace fairdebug::csv {

using Record = std::vector<std::string>;

// RFC-4180 reader: quoted fields may contain separators, doubled quotes and
// line breaks; both LF and CRLF terminate records. A trailing newline does
// not produce an empty record. Throws Error(kParse) on an unterminated quote.
std::vector<Record> parse(std::string_view text);

// Quotes a field only when it contains a comma, quote, CR or LF.
std::string escape_field(std::string_view field);

std::string format_record(const Record& record);

}  // namespace fairdebug::csv

#endif  // FAIRDEBUG_CSV_H_
