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

#ifndef FAIRDEBUG_SERVICE_H_
#define FAIRDEBUG_SERVICE_H_

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "fairdebug/error.h"
#include "fairdebug/project.h"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace fairdebug {

inline constexpr size_t kMaxCsvBytes = 64u << 20;
inline constexpr size_t kMaxTestPairs = 100000;

enum class JobStatus { kQueued, kRunning, kDone, kFailed };
std::string_view job_status_name(JobStatus status);

struct JobState {
  std::string id;
  std::string kind;  // "search", "generate" or "audit"
  std::string project_id;
  JobStatus status = JobStatus::kQueued;
  double progress = 0.0;
  nlohmann::json result;  // null until done
  std::string error_code;
  std::string error_message;
};

nlohmann::json job_to_json(const JobState& job);

struct ServiceOptions {
  // When set, every project is saved under <storage>/<project id> after each
  // mutation.
  std::optional<std::filesystem::path> storage;
  size_t workers = 1;
  size_t threads = 0;  // per-job parallelism, 0 = hardware
};

// HTTP status for an error code.
int http_status(ErrorCode code);
nlohmann::json error_body(std::string_view code, std::string_view message);

// The /v1 JSON API. Owns the projects it creates and a background worker pool
// for jobs.
class Service {
 public:
  explicit Service(ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  void register_routes(httplib::Server& server);

  // Adds an existing project (e.g. loaded from disk); returns its id.
  std::string adopt(Project project);

  // Blocks until the job leaves the queued/running states.
  JobState wait(std::string_view job_id);
  std::optional<JobState> job(std::string_view job_id) const;

  // Runs `fn` with shared access to a project. Error(kNotFound) if absent.
  void read(std::string_view project_id,
            const std::function<void(const Project&)>& fn) const;

 private:
  struct Slot {
    mutable std::shared_mutex mutex;
    Project project;
  };
  using Task = std::function<nlohmann::json(JobState& job)>;

  std::shared_ptr<Slot> slot(std::string_view project_id) const;
  void write(std::string_view project_id,
             const std::function<void(Project&)>& fn);
  std::string submit(std::string kind, std::string project_id,
                     std::string idempotency_key, Task task);
  void set_progress(const std::string& job_id, double progress);
  void worker_loop();
  void persist(const Project& p) const;
  std::string next_project_id(std::string_view content);

  ServiceOptions options_;
  mutable std::mutex projects_mutex_;
  std::map<std::string, std::shared_ptr<Slot>> projects_;
  size_t project_counter_ = 0;

  mutable std::mutex jobs_mutex_;
  std::condition_variable jobs_cv_;
  std::condition_variable jobs_done_cv_;
  std::map<std::string, JobState> jobs_;
  std::map<std::string, std::string> idempotency_;
  std::deque<std::pair<std::string, Task>> queue_;
  size_t job_counter_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> workers_;
};

// The API description served at /v1/openapi.json.
std::string_view openapi_document();

}  // namespace fairdebug

#endif  // FAIRDEBUG_SERVICE_H_
