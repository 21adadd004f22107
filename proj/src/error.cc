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

#include "fairdebug/error.h"

namespace fairdebug {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
      return "parse_error";
    case ErrorCode::kSchema:
      return "schema_error";
    case ErrorCode::kSize:
      return "size_error";
    case ErrorCode::kUsage:
      return "usage_error";
    case ErrorCode::kTraining:
      return "training_error";
    case ErrorCode::kLayout:
      return "layout_error";
    case ErrorCode::kMetric:
      return "metric_error";
    case ErrorCode::kSearch:
      return "search_error";
    case ErrorCode::kConfig:
      return "config_error";
    case ErrorCode::kValidity:
      return "validity_error";
    case ErrorCode::kExplanation:
      return "explanation_error";
    case ErrorCode::kIntegrity:
      return "integrity_error";
    case ErrorCode::kFormat:
      return "format_error";
    case ErrorCode::kNotFound:
      return "not_found";
  }
  return "unknown_error";
}

}  // namespace fairdebug
