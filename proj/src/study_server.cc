// Copyright 2026 The Countering Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "countering/study_server.h"

#include <fmt/format.h>

#include "countering/errors.h"
#include "httplib.h"

namespace countering {

namespace {

using nlohmann::json;

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, std::string_view code,
                 std::string_view message) {
  reply(res, status, json{{"error", std::string(code)}, {"message", std::string(message)}});
}

// Maps library errors onto HTTP statuses.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const UnknownTask& e) {
    reply_error(res, 404, "unknown_task", e.what());
  } catch (const TaskClosed& e) {
    reply_error(res, 409, "task_closed", e.what());
  } catch (const DuplicateAssignment& e) {
    reply_error(res, 409, "duplicate_assignment", e.what());
  } catch (const NoOpenAssignment& e) {
    reply_error(res, 409, "no_open_assignment", e.what());
  } catch (const MalformedRecord& e) {
    reply(res, 422, json{{"error", "malformed_record"}, {"details", e.details()}});
  } catch (const json::exception& e) {
    reply_error(res, 400, "bad_json", e.what());
  } catch (const std::exception& e) {
    reply_error(res, 500, "internal", e.what());
  }
}

json parse_body(const httplib::Request& req) {
  return json::parse(req.body);
}

std::optional<StudySetting> setting_param(const httplib::Request& req,
                                          httplib::Response& res, bool required) {
  if (!req.has_param("setting")) {
    if (required) reply_error(res, 400, "bad_request", "missing setting parameter");
    return std::nullopt;
  }
  auto s = parse_setting(req.get_param_value("setting"));
  if (!s) reply_error(res, 400, "bad_request", "unknown setting");
  return s;
}

}  // namespace

StudyServer::StudyServer(StudyService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

StudyServer::~StudyServer() { stop(); }

void StudyServer::install_routes() {
  auto& svc = service_;
  server_->Get("/health", [](const httplib::Request&, httplib::Response& res) {
    reply(res, 200, json{{"status", "ok"}});
  });

  server_->Post("/session", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      json body = parse_body(req);
      if (!body.is_object() || !body.contains("worker_id") || !body["worker_id"].is_string() ||
          body["worker_id"].get<std::string>().empty()) {
        throw MalformedRecord({"worker_id: missing"});
      }
      const std::string id = svc.anonymize(body["worker_id"].get<std::string>());
      reply(res, 200,
            json{{"annotator_id", id}, {"has_profile", svc.profile(id).has_value()}});
    });
  });

  server_->Get("/tasks/next", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto setting = setting_param(req, res, true);
      if (!setting) return;
      const std::string annotator = req.get_param_value("annotator");
      if (annotator.empty()) {
        reply_error(res, 400, "bad_request", "missing annotator parameter");
        return;
      }
      auto task = svc.next_task(*setting, annotator);
      if (!task) {
        reply_error(res, 409, "no_tasks", "no tasks available");
        return;
      }
      reply(res, 200, public_task_json(*task));
    });
  });

  server_->Get(R"(/tasks/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { reply(res, 200, public_task_json(svc.task(req.matches[1]))); });
  });

  server_->Post("/annotations", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      SubmitResult result = svc.submit(record_from_request(parse_body(req)));
      json body{{"status", std::string(to_string(result.status))}};
      if (result.status == SubmitStatus::kRejectedInvalid) {
        body["details"] = result.errors;
        reply(res, 422, body);
      } else {
        reply(res, 200, body);
      }
    });
  });

  server_->Get(R"(/annotators/([^/]+)/profile)",
               [&svc](const httplib::Request& req, httplib::Response& res) {
                 guarded(res, [&] {
                   auto d = svc.profile(req.matches[1]);
                   if (!d) {
                     reply_error(res, 404, "no_profile", "no profile recorded");
                     return;
                   }
                   reply(res, 200, to_json(AnnotatorProfile{req.matches[1], *d}));
                 });
               });

  server_->Post(R"(/annotators/([^/]+)/profile)",
                [&svc](const httplib::Request& req, httplib::Response& res) {
                  guarded(res, [&] {
                    json body = parse_body(req);
                    if (!body.is_object()) throw MalformedRecord({"body: expected an object"});
                    Demographics d{body.value("race", std::string()),
                                   body.value("gender", std::string())};
                    if (!svc.set_profile(req.matches[1], d)) {
                      reply_error(res, 409, "profile_exists", "profile already recorded");
                      return;
                    }
                    reply(res, 200, json{{"status", "stored"}});
                  });
                });

  server_->Get("/export", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      ExportFilter filter;
      filter.only_valid = req.get_param_value("only_valid") == "true";
      if (req.has_param("setting")) {
        filter.setting = setting_param(req, res, false);
        if (!filter.setting) return;
      }
      json out = json::array();
      for (const auto& r : svc.export_annotations(filter)) out.push_back(to_json(r));
      reply(res, 200, out);
    });
  });

  server_->Get("/export/annotators", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      json out = json::array();
      for (const auto& p : svc.export_profiles()) out.push_back(to_json(p));
      reply(res, 200, out);
    });
  });
}

int StudyServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool StudyServer::listen() { return server_->listen_after_bind(); }

void StudyServer::stop() {
  if (server_) server_->stop();
}

bool StudyServer::running() const { return server_->is_running(); }

}  // namespace countering
