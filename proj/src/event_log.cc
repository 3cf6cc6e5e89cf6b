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

#include "countering/event_log.h"

#include <fmt/format.h>

#include "countering/errors.h"

namespace countering {

using nlohmann::json;

namespace {

void check_header(const json& header, std::string_view format, int version,
                  const std::filesystem::path& path) {
  if (header.value("format", std::string()) != format) {
    throw InputError(fmt::format("{} is not a {} file", path.string(), format));
  }
  if (header.value("version", 0) != version) {
    throw InputError(fmt::format("{}: unsupported version {}", path.string(),
                                 header.value("version", 0)));
  }
}

}  // namespace

namespace {

struct Scan {
  std::vector<json> events;
  size_t good_end = 0;
  bool header_seen = false;
};

Scan scan_log(const std::string& data, const std::filesystem::path& path) {
  Scan scan;
  size_t pos = 0;
  while (pos < data.size()) {
    size_t nl = data.find('\n', pos);
    const bool terminated = nl != std::string::npos;
    std::string line = data.substr(pos, terminated ? nl - pos : std::string::npos);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception&) {
      if (terminated) {
        throw InputError(fmt::format("{}: corrupt event at byte {}", path.string(), pos));
      }
      break;  // torn tail
    }
    if (!scan.header_seen) {
      check_header(j, EventLog::kFormat, EventLog::kVersion, path);
      scan.header_seen = true;
    } else {
      scan.events.push_back(std::move(j));
    }
    if (!terminated) {
      // Complete JSON but missing newline; keep it.
      scan.good_end = data.size();
      break;
    }
    pos = nl + 1;
    scan.good_end = pos;
  }
  return scan;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

}  // namespace

EventLog::EventLog(std::filesystem::path path) : path_(std::move(path)) {
  if (std::filesystem::exists(path_)) {
    const std::string data = slurp(path_);
    Scan scan = scan_log(data, path_);
    existing_ = std::move(scan.events);
    if (scan.good_end < data.size()) std::filesystem::resize_file(path_, scan.good_end);
    const bool needs_newline = scan.good_end > 0 && data[scan.good_end - 1] != '\n';
    out_.open(path_, std::ios::app | std::ios::binary);
    if (needs_newline) out_ << '\n';
    if (!scan.header_seen) {
      out_ << json{{"format", std::string(kFormat)}, {"version", kVersion}}.dump() << '\n';
    }
  } else {
    out_.open(path_, std::ios::app | std::ios::binary);
    out_ << json{{"format", std::string(kFormat)}, {"version", kVersion}}.dump() << '\n';
  }
  if (!out_) throw InputError(fmt::format("cannot write {}", path_.string()));
  out_.flush();
}

std::vector<json> read_events(const std::filesystem::path& path) {
  return scan_log(slurp(path), path).events;
}

void EventLog::append(const json& event) {
  std::lock_guard lock(mu_);
  out_ << event.dump() << '\n';
  out_.flush();
  if (!out_) throw Error(fmt::format("write to {} failed", path_.string()));
}

void write_tasks_file(const std::filesystem::path& path,
                      const std::vector<StudyTask>& tasks) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc | std::ios::binary);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
    out << json{{"format", std::string(kTasksFormat)}, {"version", EventLog::kVersion}}.dump() << '\n';
    for (const auto& t : tasks) out << to_json(t).dump() << '\n';
  }
  std::filesystem::rename(tmp, path);
}

std::vector<StudyTask> read_tasks_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::vector<StudyTask> tasks;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (header) {
      check_header(j, kTasksFormat, EventLog::kVersion, path);
      header = false;
      continue;
    }
    tasks.push_back(task_from_json(j));
  }
  return tasks;
}

}  // namespace countering
