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

#include <array>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "countering/generic.h"
#include "countering/subtype.h"

namespace countering {

// Sampling parameters sent with every completion request.
struct CompletionParams {
  double top_p = 0.9;
  double temperature = 0.8;
  int max_tokens = 100;
  double presence_penalty = 0.0;
  double frequency_penalty = 0.0;
  // Parsed subtypes kept per prompt.
  int n_keep = 5;
};

// Text-completion backend. Implementations throw TransportError for
// transient failures and AuthError for rejected credentials.
class CompletionClient {
 public:
  virtual ~CompletionClient() = default;
  virtual std::vector<std::string> complete(const std::string& prompt,
                                            const CompletionParams& params) = 0;
};

// Probability in [0, 1] that an exception sentence is true and relevant.
class TruthScorer {
 public:
  virtual ~TruthScorer() = default;
  virtual double score(std::string_view exception_sentence) const = 0;
  // Identifies the scorer configuration in cache keys.
  virtual std::string id() const = 0;
};

// Toy scorer: 1.0 when the sentence starts with a curated known-good
// candidate, 0.5 otherwise.
class KnownGoodScorer : public TruthScorer {
 public:
  explicit KnownGoodScorer(std::vector<std::string> known_good);
  // One candidate per line; blank lines and '#' comments are skipped.
  static KnownGoodScorer load(const std::filesystem::path& path);

  double score(std::string_view exception_sentence) const override;
  std::string id() const override { return id_; }

 private:
  std::vector<std::string> known_good_;
  std::string id_;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;
Sleeper real_sleeper();

// Few-shot prompt for `group`, with the five example lines shuffled by a
// generator derived from (seed, group, kind).
std::string build_prompt(std::string_view group, SubtypeKind kind,
                         std::uint64_t seed);

// The five worked examples shown in the prompt, in canonical order.
const std::vector<std::string>& prompt_examples(SubtypeKind kind);

// Calls the client, retrying retriable transport errors with exponential
// backoff. AuthError and non-retriable errors propagate immediately.
std::vector<std::string> complete(const std::string& prompt,
                                  const CompletionParams& params,
                                  CompletionClient& client,
                                  const RetryPolicy& retry = {},
                                  const Sleeper& sleep = real_sleeper());

// Extracts "N. text" items up to the first "##" separator, lowercased and
// deduplicated, discarding the queried group itself. Keeps at most n_keep.
std::vector<Subtype> parse_subtypes(std::string_view completion,
                                    std::string_view group, SubtypeKind kind,
                                    int n_keep = CompletionParams{}.n_keep);

// The single-exception sentence scored for a candidate.
std::string exception_sentence(const Generic& g, std::string_view candidate);

// Scores every candidate and sorts by descending score, keeping input order
// among ties.
std::vector<Subtype> rank_subtypes(const Generic& g,
                                   std::vector<Subtype> candidates,
                                   const TruthScorer& scorer);

// Content-addressed store of subtype lists. With a directory, each key is one
// JSON file named by the SHA-256 of the key; without one it is memory only.
class SubtypeCache {
 public:
  explicit SubtypeCache(std::optional<std::filesystem::path> dir = std::nullopt);

  std::optional<std::vector<Subtype>> get(const std::string& key) const;
  void put(const std::string& key, const std::vector<Subtype>& value);

  static std::string candidates_key(std::string_view group, SubtypeKind kind,
                                    std::uint64_t seed);
  static std::string ranked_key(std::string_view group, SubtypeKind kind,
                                std::uint64_t seed, std::string_view scorer_id,
                                const Generic& g);

 private:
  std::filesystem::path path_for(const std::string& key) const;
  std::mutex& lock_for(const std::string& key) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::mutex memory_mu_;
  std::map<std::string, std::vector<Subtype>> memory_;
  mutable std::array<std::mutex, 32> key_locks_;
};

struct SubtypeRequest {
  std::string group;
  SubtypeKind kind = SubtypeKind::kSubgroup;
  std::uint64_t seed = 0;
  CompletionParams params;
  RetryPolicy retry;
};

// prompt -> completion -> parse -> rank, memoized in `cache` by
// (group, kind, seed) for the raw candidates and additionally by scorer and
// generic for the ranking. Cache hits never reach the client.
std::vector<Subtype> subtypes_for(const SubtypeRequest& request,
                                  CompletionClient& client,
                                  const TruthScorer& scorer, const Generic& g,
                                  SubtypeCache& cache,
                                  const Sleeper& sleep = real_sleeper());

}  // namespace countering
