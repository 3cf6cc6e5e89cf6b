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

#include <cstdint>
#include <string>
#include <vector>

#include "countering/study.h"

// Scripted annotators that drive a running study server over HTTP. Robots
// take turns strictly one request at a time, so a fixed seed against a fresh
// store always produces the same records.
namespace countering {

struct RobotConfig {
  std::string url = "http://127.0.0.1:8080";
  int annotators = 9;
  std::uint64_t seed = 7;
  double attention_failure_rate = 0.05;
  std::vector<StudySetting> settings{kAllSettings.begin(), kAllSettings.end()};
};

struct RobotSummary {
  int submitted = 0;
  int accepted = 0;
  int discarded = 0;
  int rejected = 0;
};

// Throws TransportError when the server cannot be reached or answers with an
// unexpected status.
RobotSummary run_robots(const RobotConfig& config);

}  // namespace countering
