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

#ifndef FAIRDEBUG_ERROR_H_
#define FAIRDEBUG_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace fairdebug {

// Every failure the engine reports to a caller carries one of these codes.
// The string form (error_code_name) is the stable machine-readable code used
// in CLI output and HTTP error bodies.
enum class ErrorCode {
  kParse,
  kSchema,
  kSize,
  kUsage,
  kTraining,
  kLayout,
  kMetric,
  kSearch,
  kConfig,
  kValidity,
  kExplanation,
  kIntegrity,
  kFormat,
  kNotFound,
};

std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view code_name() const { return error_code_name(code_); }

 private:
  ErrorCode code_;
};

}  // namespace fairdebug

#endif  // FAIRDEBUG_ERROR_H_
