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

#pragma once

#include <memory>
#include <string>

#include "countering/study.h"

namespace httplib {
class Server;
}

namespace countering {

// HTTP JSON front end of a StudyService.
//
//   GET  /health
//   POST /session                  {"worker_id"} -> {"annotator_id"}
//   GET  /tasks/next?setting=S&annotator=A
//   GET  /tasks/{id}
//   POST /annotations              AnnotationRecord
//   GET  /annotators/{id}/profile
//   POST /annotators/{id}/profile  {"race","gender"}
//   GET  /export?only_valid=true&setting=S
//   GET  /export/annotators
//
// 404 unknown task, 409 closed/duplicate/no tasks, 422 invalid record.
class StudyServer {
 public:
  explicit StudyServer(StudyService& service);
  ~StudyServer();

  StudyServer(const StudyServer&) = delete;
  StudyServer& operator=(const StudyServer&) = delete;

  // Binds; port 0 picks a free port. Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(). Returns false if the listener failed.
  bool listen();
  void stop();
  bool running() const;

 private:
  void install_routes();

  StudyService& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace countering
