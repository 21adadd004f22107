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

#include "fairdebug/service.h"

#include <chrono>
#include <cstdio>
#include <ctime>

#include "fairdebug/hash.h"
#include "fairdebug/payloads.h"
#include "fairdebug/stats.h"
#include "httplib.h"
#include "openapi_doc.h"

namespace fairdebug {

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code,
                std::string_view message) {
  send_json(res, status, error_body(code, message));
}

// Runs a handler body, translating exceptions into error responses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, http_status(e.code()), e.code_name(), e.what());
  } catch (const json::exception& e) {
    send_error(res, 400, "format_error", e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "internal_error", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  try {
    return json::parse(req.body);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::kFormat, std::string("request body is not JSON: ") +
                                        e.what());
  }
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::map<std::string, std::string> overrides_from_json(const json& j) {
  std::map<std::string, std::string> out;
  if (j.is_null()) return out;
  if (!j.is_object()) {
    throw Error(ErrorCode::kValidity, "overrides must be a JSON object");
  }
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) {
      out[k] = v.get<std::string>();
    } else if (v.is_number()) {
      out[k] = format_number(v.get<double>());
    } else {
      throw Error(ErrorCode::kValidity,
                  "override for '" + k + "' must be a string or number");
    }
  }
  return out;
}

size_t query_size(const httplib::Request& req, const char* key, size_t fallback) {
  if (!req.has_param(key)) return fallback;
  const std::string v = req.get_param_value(key);
  try {
    size_t used = 0;
    const unsigned long long n = std::stoull(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return static_cast<size_t>(n);
  } catch (const std::exception&) {
    throw Error(ErrorCode::kUsage, std::string("query parameter '") + key +
                                       "' must be a non-negative integer");
  }
}

}  // namespace

std::string_view job_status_name(JobStatus status) {
  switch (status) {
    case JobStatus::kQueued:
      return "queued";
    case JobStatus::kRunning:
      return "running";
    case JobStatus::kDone:
      return "done";
    case JobStatus::kFailed:
      return "failed";
  }
  return "unknown";
}

json job_to_json(const JobState& job) {
  json j = {{"id", job.id},
            {"kind", job.kind},
            {"project_id", job.project_id},
            {"status", job_status_name(job.status)},
            {"progress", job.progress},
            {"result", job.result}};
  j["error"] = job.status == JobStatus::kFailed
                   ? json{{"code", job.error_code}, {"message", job.error_message}}
                   : json(nullptr);
  return j;
}

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kFormat:
      return 400;
    case ErrorCode::kIntegrity:
      return 500;
    default:
      return 422;
  }
}

json error_body(std::string_view code, std::string_view message) {
  return {{"error", {{"code", code}, {"message", message}}}};
}

std::string_view openapi_document() { return kOpenApiDocument; }

Service::Service(ServiceOptions options) : options_(std::move(options)) {
  const size_t n = std::max<size_t>(1, options_.workers);
  for (size_t i = 0; i < n; ++i) workers_.emplace_back([this] { worker_loop(); });
}

Service::~Service() {
  {
    std::lock_guard lock(jobs_mutex_);
    stopping_ = true;
  }
  jobs_cv_.notify_all();
  for (auto& w : workers_) w.join();
}

std::string Service::next_project_id(std::string_view content) {
  std::lock_guard lock(projects_mutex_);
  const size_t n = ++project_counter_;
  return "p-" + sha256_hex(std::to_string(n) + "\n" + std::string(content)).substr(0, 12);
}

std::string Service::adopt(Project project) {
  auto s = std::make_shared<Slot>();
  const std::string id = project.id();
  s->project = std::move(project);
  std::lock_guard lock(projects_mutex_);
  projects_[id] = std::move(s);
  return id;
}

std::shared_ptr<Service::Slot> Service::slot(std::string_view project_id) const {
  std::lock_guard lock(projects_mutex_);
  const auto it = projects_.find(std::string(project_id));
  if (it == projects_.end()) {
    throw Error(ErrorCode::kNotFound,
                "project '" + std::string(project_id) + "' not found");
  }
  return it->second;
}

void Service::read(std::string_view project_id,
                   const std::function<void(const Project&)>& fn) const {
  auto s = slot(project_id);
  std::shared_lock lock(s->mutex);
  fn(s->project);
}

void Service::write(std::string_view project_id,
                    const std::function<void(Project&)>& fn) {
  auto s = slot(project_id);
  std::unique_lock lock(s->mutex);
  fn(s->project);
  persist(s->project);
}

void Service::persist(const Project& p) const {
  if (!options_.storage) return;
  const auto dir = *options_.storage / p.id();
  ProjectLock lock(dir);
  save(p, dir);
}

std::string Service::submit(std::string kind, std::string project_id,
                            std::string idempotency_key, Task task) {
  std::lock_guard lock(jobs_mutex_);
  std::string key;
  if (!idempotency_key.empty()) {
    key = project_id + "\n" + kind + "\n" + idempotency_key;
    if (const auto it = idempotency_.find(key); it != idempotency_.end()) {
      return it->second;
    }
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "job-%06zu", ++job_counter_);
  JobState job;
  job.id = buf;
  job.kind = std::move(kind);
  job.project_id = std::move(project_id);
  jobs_[job.id] = job;
  if (!key.empty()) idempotency_[key] = job.id;
  queue_.emplace_back(job.id, std::move(task));
  jobs_cv_.notify_one();
  return job.id;
}

void Service::set_progress(const std::string& job_id, double progress) {
  std::lock_guard lock(jobs_mutex_);
  JobState& job = jobs_.at(job_id);
  job.progress = std::max(job.progress, std::min(progress, 1.0));
}

void Service::worker_loop() {
  for (;;) {
    std::pair<std::string, Task> item;
    JobState snapshot;
    {
      std::unique_lock lock(jobs_mutex_);
      jobs_cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (stopping_) return;
      item = std::move(queue_.front());
      queue_.pop_front();
      JobState& job = jobs_.at(item.first);
      job.status = JobStatus::kRunning;
      snapshot = job;
    }
    json result;
    std::string code, message;
    try {
      result = item.second(snapshot);
    } catch (const Error& e) {
      code = e.code_name();
      message = e.what();
    } catch (const std::exception& e) {
      code = "internal_error";
      message = e.what();
    }
    {
      std::lock_guard lock(jobs_mutex_);
      JobState& job = jobs_.at(item.first);
      if (code.empty()) {
        job.status = JobStatus::kDone;
        job.progress = 1.0;
        job.result = std::move(result);
      } else {
        job.status = JobStatus::kFailed;
        job.error_code = std::move(code);
        job.error_message = std::move(message);
      }
    }
    jobs_done_cv_.notify_all();
  }
}

JobState Service::wait(std::string_view job_id) {
  std::unique_lock lock(jobs_mutex_);
  const std::string id(job_id);
  if (!jobs_.count(id)) {
    throw Error(ErrorCode::kNotFound, "job '" + id + "' not found");
  }
  jobs_done_cv_.wait(lock, [&] {
    const auto s = jobs_.at(id).status;
    return s == JobStatus::kDone || s == JobStatus::kFailed;
  });
  return jobs_.at(id);
}

std::optional<JobState> Service::job(std::string_view job_id) const {
  std::lock_guard lock(jobs_mutex_);
  const auto it = jobs_.find(std::string(job_id));
  if (it == jobs_.end()) return std::nullopt;
  return it->second;
}

void Service::register_routes(httplib::Server& server) {
  using httplib::Request;
  using httplib::Response;
  server.set_payload_max_length(kMaxCsvBytes + (1u << 20));
  server.set_error_handler([](const Request&, Response& res) {
    if (!res.body.empty()) return;
    if (res.status == 413) {
      send_error(res, 413, "size_error", "request payload too large");
    } else if (res.status == 404) {
      send_error(res, 404, "not_found", "no such endpoint");
    } else {
      send_error(res, res.status, "request_error", "request failed");
    }
  });

  server.Get("/v1/openapi.json", [](const Request&, Response& res) {
    res.set_content(std::string(openapi_document()), "application/json");
  });

  server.Post("/v1/projects", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      std::string csv_text, label, positive, kinds;
      if (req.is_multipart_form_data()) {
        for (const char* key : {"file", "csv"}) {
          if (req.has_file(key)) csv_text = req.get_file_value(key).content;
        }
        if (req.has_file("label")) label = req.get_file_value("label").content;
        for (const char* key : {"positive_label", "positive"}) {
          if (req.has_file(key)) positive = req.get_file_value(key).content;
        }
        if (req.has_file("kinds")) kinds = req.get_file_value("kinds").content;
      } else {
        const json body = parse_body(req);
        csv_text = body.value("csv", "");
        label = body.value("label", "");
        positive = body.value("positive_label", "");
        if (body.contains("kinds")) kinds = body.at("kinds").dump();
      }
      if (csv_text.size() > kMaxCsvBytes) {
        send_error(res, 413, "size_error", "CSV exceeds 64 MB");
        return;
      }
      if (label.empty() || positive.empty()) {
        throw Error(ErrorCode::kUsage, "label and positive_label are required");
      }
      const KindOverrides overrides =
          kinds.empty() ? KindOverrides{} : parse_kind_overrides(kinds);
      Dataset ds = ingest_csv(csv_text, label, positive, overrides);
      const std::string id = next_project_id(csv_text);
      Project p(id, utc_now(), std::move(ds));
      persist(p);
      const json body = {{"id", id},
                         {"rows", p.data().size()},
                         {"schema", schema_to_json(p.schema())}};
      adopt(std::move(p));
      send_json(res, 201, body);
    });
  });

  server.Get(R"(/v1/projects/([^/]+))", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(),
           [&](const Project& p) { send_json(res, 200, project_summary(p)); });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/protected)",
              [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const std::string column = body.at("column").get<std::string>();
      const auto groups = body.at("groups").get<std::vector<std::string>>();
      write(req.matches[1].str(), [&](Project& p) {
        p.set_protected(column, groups);
        send_json(res, 200, {{"schema", schema_to_json(p.schema())}});
      });
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/interactions)",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        send_json(res, 200, json(interactions(p.data())));
      });
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/histogram/([^/]+))",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        const std::string column = req.matches[2].str();
        const InteractionReport report = interactions(p.data());
        const ColumnInteraction* ci = report.find(column);
        if (!ci) {
          throw Error(ErrorCode::kNotFound,
                      "no histogram for column '" + column + "'");
        }
        json body = *ci;
        body["groups"] = report.groups;
        send_json(res, 200, body);
      });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/mask)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const std::string column = body.at("column").get<std::string>();
      std::optional<std::vector<std::string>> values;
      if (body.contains("values") && !body.at("values").is_null()) {
        values = body.at("values").get<std::vector<std::string>>();
      }
      write(req.matches[1].str(), [&](Project& p) {
        p.mask(column, values);
        send_json(res, 200, {{"schema", schema_to_json(p.schema())}});
      });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/split)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      if (!body.contains("seed")) throw Error(ErrorCode::kUsage, "seed is required");
      const uint64_t seed = body.at("seed").get<uint64_t>();
      write(req.matches[1].str(), [&](Project& p) {
        const SplitPair& s = p.make_split(seed);
        send_json(res, 200, {{"split_id", p.split_id()},
                             {"seed", seed},
                             {"train", s.train.size()},
                             {"test", s.test.size()}});
      });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/searches)",
              [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const std::string pid = req.matches[1].str();
      SearchConfig cfg = search_config_from_json(parse_body(req));
      cfg.threads = options_.threads;
      write(pid, [&](Project& p) {
        if (!p.schema().has_protected()) {
          throw Error(ErrorCode::kUsage,
                      "set a protected attribute before searching");
        }
        if (!p.has_split()) p.make_split(cfg.seed);
      });
      const std::string job_id = submit(
          "search", pid, req.get_header_value("Idempotency-Key"),
          [this, pid, cfg](JobState& job) {
            Project snapshot;
            read(pid, [&](const Project& p) { snapshot = p; });
            SearchObserver observer;
            const std::string job_id = job.id;
            observer.on_progress = [this, job_id](size_t done, size_t budget) {
              set_progress(job_id, budget ? double(done) / double(budget) : 1.0);
            };
            const std::string id = snapshot.run_search(cfg, observer);
            write(pid, [&](Project& p) { p.merge_derived(snapshot); });
            return json{{"search_id", id}};
          });
      send_json(res, 202, {{"job_id", job_id}});
    });
  });

  server.Get(R"(/v1/jobs/([^/]+))", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const auto j = job(req.matches[1].str());
      if (!j) {
        throw Error(ErrorCode::kNotFound,
                    "job '" + req.matches[1].str() + "' not found");
      }
      send_json(res, 200, job_to_json(*j));
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/searches/([^/]+)/archive)",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        send_json(res, 200, archive_payload(p.search(req.matches[2].str())));
      });
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/models/([^/]+)/logic)",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        send_json(res, 200, json(extract_logic(p.model(req.matches[2].str()))));
      });
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/models/([^/]+)/report)",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        send_json(res, 200, json(p.model_report(req.matches[2].str())));
      });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/tests)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const std::string pid = req.matches[1].str();
      const json body = parse_body(req);
      const std::string model_id = body.at("model_id").get<std::string>();
      const std::string source = body.value("source", "generated");
      size_t n = 0;
      uint64_t seed = 0;
      if (source == "generated") {
        if (!body.contains("seed")) throw Error(ErrorCode::kUsage, "seed is required");
        seed = body.at("seed").get<uint64_t>();
        n = body.at("n").get<size_t>();
        if (n == 0) throw Error(ErrorCode::kSize, "n must be at least 1");
        if (n > kMaxTestPairs) {
          throw Error(ErrorCode::kSize, "n must be at most 100000");
        }
      } else if (source != "test_split") {
        throw Error(ErrorCode::kUsage, "source must be 'generated' or 'test_split'");
      }
      // Fail fast on unknown models instead of inside the job.
      read(pid, [&](const Project& p) { p.model(model_id); });
      const std::string job_id = submit(
          "generate", pid, req.get_header_value("Idempotency-Key"),
          [this, pid, model_id, source, n, seed](JobState&) {
            Project snapshot;
            read(pid, [&](const Project& p) { snapshot = p; });
            const std::string id =
                source == "generated"
                    ? snapshot.generate_tests(model_id, n, seed, options_.threads)
                    : snapshot.tests_from_split(model_id);
            const size_t count = snapshot.suite(id).pairs.size();
            write(pid, [&](Project& p) { p.merge_derived(snapshot); });
            return json{{"suite_id", id}, {"pairs", count}};
          });
      send_json(res, 202, {{"job_id", job_id}});
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/tests)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        std::string suite_id = req.get_param_value("suite");
        if (suite_id.empty()) {
          if (p.suites().size() != 1) {
            throw Error(ErrorCode::kUsage,
                        "query parameter 'suite' is required when the project "
                        "has zero or several test suites");
          }
          suite_id = p.suites().begin()->first;
        }
        const TestSuite& suite = p.suite(suite_id);
        const auto filter = PairFilter::parse(req.get_param_value("filter"));
        const auto pairs = filter_pairs(suite.pairs, filter);
        const size_t offset = std::min(query_size(req, "offset", 0), pairs.size());
        const size_t limit = query_size(req, "limit", pairs.size());
        json list = json::array();
        for (size_t i = offset; i < pairs.size() && i - offset < limit; ++i) {
          list.push_back(pair_to_json(p.schema(), pairs[i]));
        }
        send_json(res, 200, {{"suite_id", suite_id},
                             {"model_id", suite.model_id},
                             {"total", pairs.size()},
                             {"offset", offset},
                             {"pairs", std::move(list)}});
      });
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/tests/([^/]+))",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        const auto [suite, pair] = p.find_pair(req.matches[2].str());
        json body = pair_to_json(p.schema(), *pair);
        body["suite_id"] = suite->id;
        send_json(res, 200, body);
      });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/tests/([^/]+)/counterfactual)",
              [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const json body = parse_body(req);
      const auto overrides =
          overrides_from_json(body.contains("overrides") ? body.at("overrides")
                                                         : json(nullptr));
      read(req.matches[1].str(), [&](const Project& p) {
        send_json(res, 200,
                  edit_to_json(p.schema(), p.edit(req.matches[2].str(), overrides)));
      });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/audits)", [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const std::string pid = req.matches[1].str();
      const json body = parse_body(req);
      const std::string suite_id = body.at("suite_id").get<std::string>();
      std::vector<ProxyRule> rules = parse_rules(body.at("rules"));
      Project snapshot;
      read(pid, [&](const Project& p) { snapshot = p; });
      const std::string id =
          snapshot.run_audit(suite_id, std::move(rules), options_.threads);
      write(pid, [&](Project& p) { p.merge_derived(snapshot); });
      send_json(res, 200, audit_payload(snapshot.schema(), snapshot.audit(id)));
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/audits/([^/]+))",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        send_json(res, 200, audit_payload(p.schema(), p.audit(req.matches[2].str())));
      });
    });
  });

  server.Post(R"(/v1/projects/([^/]+)/explanations)",
              [this](const Request& req, Response& res) {
    guarded(res, [&] {
      const std::string pid = req.matches[1].str();
      const json body = parse_body(req);
      if (!body.contains("seed")) throw Error(ErrorCode::kUsage, "seed is required");
      ExplainOptions options;
      options.seed = body.at("seed").get<uint64_t>();
      options.top_k = body.value("top_k", options.top_k);
      options.n_samples = body.value("n_samples", options.n_samples);
      options.threads = options_.threads;
      const std::string model_id = body.at("model_id").get<std::string>();
      Project snapshot;
      read(pid, [&](const Project& p) { snapshot = p; });
      Instance x;
      std::string instance_id;
      if (body.contains("test_id")) {
        instance_id = body.at("test_id").get<std::string>();
        const auto [suite, pair] = snapshot.find_pair(instance_id);
        const std::string which = body.value("which", "original");
        if (which != "original" && which != "counterfactual") {
          throw Error(ErrorCode::kUsage, "which must be original or counterfactual");
        }
        x = which == "original" ? pair->original : pair->counterfactual;
        if (which == "counterfactual") instance_id += "/counterfactual";
      } else {
        x = instance_from_json(snapshot.schema(), body.at("instance"));
        instance_id = body.value("instance_id", "");
      }
      const std::string id = snapshot.explain(model_id, x, instance_id, options);
      write(pid, [&](Project& p) { p.merge_derived(snapshot); });
      send_json(res, 200, explanation_payload(snapshot, snapshot.explanation(id)));
    });
  });

  server.Get(R"(/v1/projects/([^/]+)/explanations/([^/]+))",
             [this](const Request& req, Response& res) {
    guarded(res, [&] {
      read(req.matches[1].str(), [&](const Project& p) {
        send_json(res, 200, explanation_payload(p, p.explanation(req.matches[2].str())));
      });
    });
  });
}

}  // namespace fairdebug
