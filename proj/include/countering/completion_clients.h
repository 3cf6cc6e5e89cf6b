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

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "countering/subtypes.h"

namespace countering {

struct HttpClientConfig {
  // scheme://host[:port][/prefix]; requests go to {prefix}/completions and
  // the prefix defaults to /v1.
  std::string base_url = "https://api.openai.com/v1";
  std::string api_key;
  std::string model = "davinci-002";
  std::chrono::seconds timeout{30};

  // COUNTERING_API_BASE, COUNTERING_API_KEY, COUNTERING_MODEL.
  static HttpClientConfig from_env();
};

// JSON completion endpoint in the OpenAI /completions shape.
class HttpCompletionClient : public CompletionClient {
 public:
  explicit HttpCompletionClient(HttpClientConfig config);

  std::vector<std::string> complete(const std::string& prompt,
                                    const CompletionParams& params) override;

 private:
  HttpClientConfig config_;
  std::string origin_;
  std::string path_;
};

// Offline stand-in that answers from `<dir>/<group-slug>.<kind>.txt`, where
// the group and kind are recovered from the prompt itself.
class FixtureCompletionClient : public CompletionClient {
 public:
  explicit FixtureCompletionClient(std::filesystem::path dir);

  std::vector<std::string> complete(const std::string& prompt,
                                    const CompletionParams& params) override;

  static std::string slug(std::string_view group);
  static std::filesystem::path fixture_path(const std::filesystem::path& dir,
                                            std::string_view group,
                                            SubtypeKind kind);

 private:
  std::filesystem::path dir_;
};

// Refuses every request; used when only cached results may be served.
class OfflineClient : public CompletionClient {
 public:
  std::vector<std::string> complete(const std::string& prompt,
                                    const CompletionParams& params) override;
};

// Recovers the queried group from the prompt's final line.
std::string prompt_group(std::string_view prompt);
SubtypeKind prompt_kind(std::string_view prompt);

}  // namespace countering
