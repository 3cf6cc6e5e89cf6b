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

#include <filesystem>
#include <fstream>
#include <mutex>
#include <vector>

#include "countering/study.h"
#include "json.hpp"

namespace countering {

// Append-only JSON-lines log. The first line is a header naming the format
// and version; each further line is one event. Appends are flushed before
// returning.
class EventLog {
 public:
  static constexpr std::string_view kFormat = "countering-study-log";
  static constexpr int kVersion = 1;

  // Opens `path`, creating it if needed, and reads back existing events. A
  // torn final line (no newline, unparseable) is dropped and truncated away.
  explicit EventLog(std::filesystem::path path);

  const std::vector<nlohmann::json>& existing() const { return existing_; }
  void append(const nlohmann::json& event);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  std::vector<nlohmann::json> existing_;
  std::ofstream out_;
  std::mutex mu_;
};

// Reads events without opening the log for writing; a torn tail is ignored
// but left in place.
std::vector<nlohmann::json> read_events(const std::filesystem::path& path);

inline constexpr std::string_view kTasksFormat = "countering-study-tasks";

void write_tasks_file(const std::filesystem::path& path,
                      const std::vector<StudyTask>& tasks);
std::vector<StudyTask> read_tasks_file(const std::filesystem::path& path);

}  // namespace countering
