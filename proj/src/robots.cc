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

#include "countering/robots.h"

#include <algorithm>
#include <optional>
#include <regex>

#include <fmt/format.h>

#include "countering/errors.h"
#include "countering/random.h"
#include "httplib.h"
#include "json.hpp"

namespace countering {

namespace {

using nlohmann::json;

constexpr const char* kRaces[] = {"white", "black", "asian", "hispanic", "mixed", ""};
constexpr const char* kGenders[] = {"woman", "man", "non-binary", ""};

struct Robot {
  std::string annotator_id;
  SeededRng rng;
};

class Api {
 public:
  explicit Api(const std::string& url) : client_(url) {
    client_.set_connection_timeout(5, 0);
    client_.set_read_timeout(30, 0);
  }

  std::pair<int, json> get(const std::string& path) { return unwrap(client_.Get(path), path); }

  std::pair<int, json> post(const std::string& path, const json& body) {
    return unwrap(client_.Post(path, body.dump(), "application/json"), path);
  }

 private:
  static std::pair<int, json> unwrap(const httplib::Result& res, const std::string& path) {
    if (!res) {
      throw TransportError(fmt::format("{}: {}", path, httplib::to_string(res.error())));
    }
    json body = json::parse(res->body, nullptr, false);
    return {res->status, body.is_discarded() ? json() : std::move(body)};
  }

  httplib::Client client_;
};

void expect(int status, int wanted, const std::string& what) {
  if (status != wanted) throw TransportError(fmt::format("{}: HTTP {}", what, status), false);
}

// Lots statements get a heavier weight so reports show a clear favourite.
double weight(const json& option) {
  const std::string text = option.value("text", "");
  return text.find("Lots of people") != std::string::npos ? 3.0 : 1.0;
}

size_t weighted_pick(SeededRng& rng, const std::vector<double>& weights) {
  double total = 0;
  for (double w : weights) total += w;
  double x = rng.unit() * total;
  for (size_t i = 0; i < weights.size(); ++i) {
    if (x < weights[i]) return i;
    x -= weights[i];
  }
  return weights.size() - 1;
}

std::optional<int> instructed_position(const json& task) {
  static const std::regex re(R"(option (\d+))");
  for (const auto& q : task.at("questions")) {
    if (q.value("type", "") != "attention") continue;
    std::smatch m;
    const std::string text = q.value("instruction", "");
    if (std::regex_search(text, m, re)) return std::stoi(m[1].str());
  }
  return std::nullopt;
}

json answer(Robot& robot, const json& task, double failure_rate) {
  const json& options = task.at("options");
  const size_t k = options.size();
  std::vector<double> weights;
  for (const auto& o : options) weights.push_back(weight(o));

  const size_t first = weighted_pick(robot.rng, weights);
  weights[first] = 0;
  const size_t second = weighted_pick(robot.rng, weights);

  json incorrect = json::array();
  json ungrammatical = json::array();
  for (const auto& o : options) {
    if (robot.rng.unit() < 0.1) incorrect.push_back(o.at("option_id"));
    if (robot.rng.unit() < 0.05) ungrammatical.push_back(o.at("option_id"));
  }

  std::string attention;
  if (auto pos = instructed_position(task); pos && *pos >= 1 && static_cast<size_t>(*pos) <= k) {
    size_t idx = static_cast<size_t>(*pos - 1);
    if (robot.rng.unit() < failure_rate) idx = (idx + 1 + robot.rng.below(k - 1)) % k;
    attention = options[idx].at("option_id").get<std::string>();
  }

  return json{{"task_id", task.at("task_id")},
              {"annotator_id", robot.annotator_id},
              {"first_choice", options[first].at("option_id")},
              {"second_choice", options[second].at("option_id")},
              {"incorrect_marks", incorrect},
              {"ungrammatical_marks", ungrammatical},
              {"agreement", static_cast<int>(kAgreementMin + robot.rng.below(kAgreementMax))},
              {"attention_answer", attention}};
}

}  // namespace

RobotSummary run_robots(const RobotConfig& config) {
  Api api(config.url);
  auto [health, hbody] = api.get("/health");
  expect(health, 200, "/health");

  std::vector<Robot> robots;
  for (int i = 0; i < config.annotators; ++i) {
    const std::string worker = fmt::format("robot-{:03}", i);
    auto [status, body] = api.post("/session", json{{"worker_id", worker}});
    expect(status, 200, "/session");
    Robot robot{body.at("annotator_id").get<std::string>(),
                SeededRng(derive_seed(config.seed, "robot|" + worker))};
    if (!body.value("has_profile", false)) {
      json profile{{"race", kRaces[robot.rng.below(std::size(kRaces))]},
                   {"gender", kGenders[robot.rng.below(std::size(kGenders))]}};
      auto [pstatus, pbody] =
          api.post(fmt::format("/annotators/{}/profile", robot.annotator_id), profile);
      if (pstatus != 200 && pstatus != 409) expect(pstatus, 200, "profile");
    }
    robots.push_back(std::move(robot));
  }

  RobotSummary summary;
  bool progressed = true;
  while (progressed) {
    progressed = false;
    for (Robot& robot : robots) {
      for (StudySetting s : config.settings) {
        auto [status, task] = api.get(fmt::format("/tasks/next?setting={}&annotator={}",
                                                  to_string(s), robot.annotator_id));
        if (status == 409) continue;
        expect(status, 200, "/tasks/next");
        auto [sstatus, result] =
            api.post("/annotations", answer(robot, task, config.attention_failure_rate));
        ++summary.submitted;
        progressed = true;
        const std::string outcome = result.value("status", "");
        if (sstatus == 200 && outcome == "accepted") {
          ++summary.accepted;
        } else if (sstatus == 200 && outcome == "discarded_attention") {
          ++summary.discarded;
        } else if (sstatus == 422) {
          ++summary.rejected;
        } else {
          expect(sstatus, 200, "/annotations");
        }
      }
    }
  }
  return summary;
}

}  // namespace countering
