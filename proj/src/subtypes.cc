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

#include "countering/subtypes.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "countering/digest.h"
#include "countering/errors.h"
#include "countering/random.h"
#include "countering/serialization.h"
#include "countering/text.h"
#include "json.hpp"

namespace countering {

namespace {

using nlohmann::json;

const std::vector<std::string> kSubgroupExamples = {
    "male students", "male authors", "male atheletes", "businessmen",
    "male movie stars"};

// The individual prompt keeps the subgroup prompt's header line.
const std::vector<std::string> kIndividualExamples = {
    "Barack Obama", "Sherlock Holmes", "Usain Bolt", "Ryan Reynolds",
    "Stephan Hawking"};

// Parses "12. text" or "12) text"; returns the text part.
std::optional<std::string_view> numbered_item(std::string_view line) {
  size_t i = 0;
  while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
  if (i == 0 || i >= line.size() || (line[i] != '.' && line[i] != ')')) {
    return std::nullopt;
  }
  return line.substr(i + 1);
}

}  // namespace

std::string_view to_string(SubtypeKind kind) {
  return kind == SubtypeKind::kSubgroup ? "subgroup" : "individual";
}

std::optional<SubtypeKind> parse_subtype_kind(std::string_view name) {
  if (name == "subgroup") return SubtypeKind::kSubgroup;
  if (name == "individual") return SubtypeKind::kIndividual;
  return std::nullopt;
}

KnownGoodScorer::KnownGoodScorer(std::vector<std::string> known_good) {
  for (auto& k : known_good) {
    std::string folded = text::to_lower(text::squeeze(k));
    if (!folded.empty()) known_good_.push_back(std::move(folded));
  }
  std::sort(known_good_.begin(), known_good_.end());
  known_good_.erase(std::unique(known_good_.begin(), known_good_.end()),
                    known_good_.end());
  id_ = "known-good:" + sha256_hex(text::join(known_good_, "\n")).substr(0, 16);
}

KnownGoodScorer KnownGoodScorer::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::vector<std::string> entries;
  std::string line;
  while (std::getline(in, line)) {
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    entries.push_back(t);
  }
  return KnownGoodScorer(std::move(entries));
}

double KnownGoodScorer::score(std::string_view exception_sentence) const {
  const std::string s = text::to_lower(exception_sentence);
  for (const auto& k : known_good_) {
    if (s.size() > k.size() && s.starts_with(k) && s[k.size()] == ' ') return 1.0;
  }
  return 0.5;
}

Sleeper real_sleeper() {
  return [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

const std::vector<std::string>& prompt_examples(SubtypeKind kind) {
  return kind == SubtypeKind::kSubgroup ? kSubgroupExamples : kIndividualExamples;
}

std::string build_prompt(std::string_view group, SubtypeKind kind,
                         std::uint64_t seed) {
  std::vector<std::string> examples = prompt_examples(kind);
  SeededRng rng(derive_seed(
      seed, fmt::format("prompt|{}|{}", to_string(kind),
                        text::to_lower(text::squeeze(group)))));
  rng.shuffle(std::span<std::string>(examples));

  std::string prompt = "Consider the following groups of men:\n";
  for (size_t i = 0; i < examples.size(); ++i) {
    prompt += fmt::format("{}. {}\n", i + 1, examples[i]);
  }
  prompt += "##\n##\n";
  prompt += fmt::format("Consider the following groups of {}:", group);
  return prompt;
}

std::vector<std::string> complete(const std::string& prompt,
                                  const CompletionParams& params,
                                  CompletionClient& client,
                                  const RetryPolicy& retry, const Sleeper& sleep) {
  auto backoff = retry.initial_backoff;
  const int attempts = std::max(1, retry.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      return client.complete(prompt, params);
    } catch (const TransportError& e) {
      if (!e.retriable()) throw;
      if (attempt >= attempts) {
        throw TransportError(
            fmt::format("completion failed after {} attempts: {}", attempt, e.what()),
            false);
      }
    }
    sleep(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(backoff.count()) * retry.multiplier));
  }
}

std::vector<Subtype> parse_subtypes(std::string_view completion,
                                    std::string_view group, SubtypeKind kind,
                                    int n_keep) {
  std::vector<Subtype> out;
  const std::string folded_group = text::to_lower(text::squeeze(group));
  std::istringstream lines{std::string(completion)};
  std::string line;
  while (std::getline(lines, line) && static_cast<int>(out.size()) < n_keep) {
    const std::string t = text::trim(line);
    if (t.starts_with("##")) break;
    auto item = numbered_item(t);
    if (!item) continue;
    std::string surface =
        text::to_lower(text::squeeze(text::strip_trailing_punct(*item)));
    // Separators would break the "a, b, and c" listing.
    if (surface.empty() || surface.find_first_of(",:;") != std::string::npos) {
      continue;
    }
    if (surface == folded_group) continue;
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const Subtype& s) { return s.surface == surface; });
    if (seen) continue;
    out.push_back({std::move(surface), kind, 0.0});
  }
  return out;
}

std::string exception_sentence(const Generic& g, std::string_view candidate) {
  return text::join_words({candidate, negate_predicate(g.relation, g.quality)}) + ".";
}

std::vector<Subtype> rank_subtypes(const Generic& g,
                                   std::vector<Subtype> candidates,
                                   const TruthScorer& scorer) {
  for (Subtype& c : candidates) {
    double s;
    try {
      s = scorer.score(exception_sentence(g, c.surface));
    } catch (const std::exception& e) {
      throw ScorerFailure(c.surface, e.what());
    }
    if (!(s >= 0.0 && s <= 1.0)) {
      throw ScorerFailure(c.surface, fmt::format("score {} outside [0, 1]", s));
    }
    c.score = s;
  }
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Subtype& a, const Subtype& b) { return a.score > b.score; });
  return candidates;
}

SubtypeCache::SubtypeCache(std::optional<std::filesystem::path> dir)
    : dir_(std::move(dir)) {
  if (dir_) std::filesystem::create_directories(*dir_);
}

std::string SubtypeCache::candidates_key(std::string_view group, SubtypeKind kind,
                                         std::uint64_t seed) {
  return json{{"v", 1},
              {"what", "candidates"},
              {"group", text::to_lower(text::squeeze(group))},
              {"kind", std::string(to_string(kind))},
              {"seed", seed}}
      .dump();
}

std::string SubtypeCache::ranked_key(std::string_view group, SubtypeKind kind,
                                     std::uint64_t seed, std::string_view scorer_id,
                                     const Generic& g) {
  return json{{"v", 1},
              {"what", "ranked"},
              {"group", text::to_lower(text::squeeze(group))},
              {"kind", std::string(to_string(kind))},
              {"seed", seed},
              {"scorer", std::string(scorer_id)},
              {"relation", g.relation},
              {"quality", g.quality}}
      .dump();
}

std::filesystem::path SubtypeCache::path_for(const std::string& key) const {
  return *dir_ / (sha256_hex(key) + ".json");
}

std::mutex& SubtypeCache::lock_for(const std::string& key) const {
  return key_locks_[stable_hash(key) % key_locks_.size()];
}

std::optional<std::vector<Subtype>> SubtypeCache::get(const std::string& key) const {
  if (!dir_) {
    std::lock_guard lock(memory_mu_);
    auto it = memory_.find(key);
    if (it == memory_.end()) return std::nullopt;
    return it->second;
  }
  std::lock_guard lock(lock_for(key));
  std::ifstream in(path_for(key));
  if (!in) return std::nullopt;
  json j;
  try {
    in >> j;
    if (j.at("key").get<std::string>() != key) return std::nullopt;
    std::vector<Subtype> out;
    for (const auto& s : j.at("subtypes")) out.push_back(subtype_from_json(s));
    return out;
  } catch (const std::exception&) {
    return std::nullopt;  // torn or foreign file: treat as a miss
  }
}

void SubtypeCache::put(const std::string& key, const std::vector<Subtype>& value) {
  if (!dir_) {
    std::lock_guard lock(memory_mu_);
    memory_[key] = value;
    return;
  }
  json j{{"key", key}, {"subtypes", json::array()}};
  for (const auto& s : value) j["subtypes"].push_back(to_json(s));
  std::lock_guard lock(lock_for(key));
  const auto final_path = path_for(key);
  auto tmp = final_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
    out << j.dump(2) << "\n";
  }
  std::filesystem::rename(tmp, final_path);
}

std::vector<Subtype> subtypes_for(const SubtypeRequest& request,
                                  CompletionClient& client,
                                  const TruthScorer& scorer, const Generic& g,
                                  SubtypeCache& cache, const Sleeper& sleep) {
  const std::string ranked_key = SubtypeCache::ranked_key(
      request.group, request.kind, request.seed, scorer.id(), g);
  if (auto hit = cache.get(ranked_key)) return *hit;

  const std::string cand_key =
      SubtypeCache::candidates_key(request.group, request.kind, request.seed);
  std::vector<Subtype> candidates;
  if (auto hit = cache.get(cand_key)) {
    candidates = std::move(*hit);
  } else {
    const std::string prompt = build_prompt(request.group, request.kind, request.seed);
    for (const std::string& text :
         complete(prompt, request.params, client, request.retry, sleep)) {
      for (Subtype& s : parse_subtypes(text, request.group, request.kind,
                                       request.params.n_keep)) {
        bool seen = std::any_of(candidates.begin(), candidates.end(),
                                [&](const Subtype& c) { return c.surface == s.surface; });
        if (!seen && static_cast<int>(candidates.size()) < request.params.n_keep) {
          candidates.push_back(std::move(s));
        }
      }
    }
    cache.put(cand_key, candidates);
  }

  std::vector<Subtype> ranked = rank_subtypes(g, std::move(candidates), scorer);
  cache.put(ranked_key, ranked);
  return ranked;
}

}  // namespace countering
