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

#ifndef FAIRDEBUG_PAYLOADS_H_
#define FAIRDEBUG_PAYLOADS_H_

#include "fairdebug/project.h"
#include "json.hpp"

// JSON documents shared by the CLI and the HTTP API.
namespace fairdebug {

nlohmann::json project_summary(const Project& p);
nlohmann::json archive_payload(const SearchRecord& search);
nlohmann::json audit_payload(const Schema& schema, const AuditRecord& audit);
// Includes the proxy story when a protected attribute is set.
nlohmann::json explanation_payload(const Project& p, const ExplanationRecord& r);

}  // namespace fairdebug

#endif  // FAIRDEBUG_PAYLOADS_H_
