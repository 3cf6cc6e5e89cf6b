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

#include "countering/completion_clients.h"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "countering/errors.h"
#include "countering/text.h"
#include "httplib.h"
#include "json.hpp"

namespace countering {

namespace {

constexpr std::string_view kPromptTail = "Consider the following groups of ";

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : std::move(fallback);
}

}  // namespace

HttpClientConfig HttpClientConfig::from_env() {
  HttpClientConfig c;
  c.base_url = env_or("COUNTERING_API_BASE", c.base_url);
  c.api_key = env_or("COUNTERING_API_KEY", "");
  c.model = env_or("COUNTERING_MODEL", c.model);
  return c;
}

HttpCompletionClient::HttpCompletionClient(HttpClientConfig config)
    : config_(std::move(config)) {
  const std::string& url = config_.base_url;
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw InputError(fmt::format("completion base URL '{}' lacks a scheme", url));
  }
  auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "/v1" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  path_ = prefix + "/completions";
}

std::vector<std::string> HttpCompletionClient::complete(
    const std::string& prompt, const CompletionParams& params) {
  httplib::Client cli(origin_);
  cli.set_connection_timeout(config_.timeout);
  cli.set_read_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  nlohmann::json body{{"model", config_.model},
                      {"prompt", prompt},
                      {"top_p", params.top_p},
                      {"temperature", params.temperature},
                      {"max_tokens", params.max_tokens},
                      {"presence_penalty", params.presence_penalty},
                      {"frequency_penalty", params.frequency_penalty},
                      {"n", 1}};
  auto res = cli.Post(path_, headers, body.dump(), "application/json");
  if (!res) {
    throw TransportError(fmt::format("POST {}{}: {}", origin_, path_,
                                     httplib::to_string(res.error())));
  }
  if (res->status == 401 || res->status == 403) {
    throw AuthError(fmt::format("completion endpoint rejected credentials ({})",
                                res->status));
  }
  if (res->status != 200) {
    const bool transient =
        res->status == 408 || res->status == 429 || res->status >= 500;
    throw TransportError(
        fmt::format("completion endpoint returned {}", res->status), transient);
  }
  std::vector<std::string> texts;
  try {
    auto j = nlohmann::json::parse(res->body);
    for (const auto& choice : j.at("choices")) {
      texts.push_back(choice.at("text").get<std::string>());
    }
  } catch (const nlohmann::json::exception& e) {
    throw TransportError(fmt::format("unparseable completion response: {}", e.what()),
                         false);
  }
  return texts;
}

std::string prompt_group(std::string_view prompt) {
  auto pos = prompt.rfind(kPromptTail);
  if (pos == std::string_view::npos) return {};
  std::string_view rest = prompt.substr(pos + kPromptTail.size());
  auto end = rest.find('\n');
  std::string line = text::trim(rest.substr(0, end));
  if (!line.empty() && line.back() == ':') line.pop_back();
  return line;
}

SubtypeKind prompt_kind(std::string_view prompt) {
  const auto& names = prompt_examples(SubtypeKind::kIndividual);
  return prompt.find(names.front()) != std::string_view::npos
             ? SubtypeKind::kIndividual
             : SubtypeKind::kSubgroup;
}

FixtureCompletionClient::FixtureCompletionClient(std::filesystem::path dir)
    : dir_(std::move(dir)) {
  if (!std::filesystem::is_directory(dir_)) {
    throw InputError(fmt::format("mock fixture directory {} not found", dir_.string()));
  }
}

std::string FixtureCompletionClient::slug(std::string_view group) {
  std::string out;
  for (char c : text::to_lower(text::squeeze(group))) {
    out += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  }
  return out;
}

std::filesystem::path FixtureCompletionClient::fixture_path(
    const std::filesystem::path& dir, std::string_view group, SubtypeKind kind) {
  return dir / fmt::format("{}.{}.txt", slug(group), to_string(kind));
}

std::vector<std::string> FixtureCompletionClient::complete(
    const std::string& prompt, const CompletionParams&) {
  const std::string group = prompt_group(prompt);
  auto path = fixture_path(dir_, group, prompt_kind(prompt));
  std::ifstream in(path);
  if (!in) {
    throw TransportError(fmt::format("no mock completion {}", path.string()), false);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  return {buf.str()};
}

std::vector<std::string> OfflineClient::complete(const std::string& prompt,
                                                 const CompletionParams&) {
  throw CacheMiss(fmt::format("cache miss for '{}' ({}) in offline mode",
                              prompt_group(prompt), to_string(prompt_kind(prompt))));
}

}  // namespace countering
