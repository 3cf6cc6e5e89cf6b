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

#include <gtest/gtest.h>

#include <algorithm>
#include <set>
#include <thread>

#include "countering/completion_clients.h"
#include "countering/errors.h"
#include "countering/random.h"
#include "countering/subtypes.h"
#include "httplib.h"
#include "json.hpp"
#include "support/test_support.h"

namespace countering {
namespace {

using testing::RecordingSleeper;
using testing::ScriptedClient;
using testing::TableScorer;
using testing::TempDir;

const std::vector<std::string> kSubgroupExamples = {"male students", "male authors",
                                                    "male atheletes", "businessmen",
                                                    "male movie stars"};
const std::vector<std::string> kIndividualExamples = {"Barack Obama", "Sherlock Holmes",
                                                      "Usain Bolt", "Ryan Reynolds",
                                                      "Stephan Hawking"};

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  size_t pos = 0;
  while (true) {
    size_t nl = s.find('\n', pos);
    out.push_back(s.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos));
    if (nl == std::string::npos) break;
    pos = nl + 1;
  }
  return out;
}

// Checks the fixed template and returns the example order it used.
std::vector<std::string> check_template(const std::string& prompt, const std::string& group,
                                        const std::vector<std::string>& examples) {
  const auto lines = lines_of(prompt);
  EXPECT_EQ(lines.size(), 9u);
  if (lines.size() != 9u) return {};
  EXPECT_EQ(lines[0], "Consider the following groups of men:");
  std::vector<std::string> order;
  for (int i = 0; i < 5; ++i) {
    const std::string prefix = std::to_string(i + 1) + ". ";
    EXPECT_EQ(lines[1 + i].rfind(prefix, 0), 0u) << lines[1 + i];
    order.push_back(lines[1 + i].substr(prefix.size()));
  }
  EXPECT_EQ(lines[6], "##");
  EXPECT_EQ(lines[7], "##");
  EXPECT_EQ(lines[8], "Consider the following groups of " + group + ":");
  for (const auto& e : examples) {
    EXPECT_EQ(std::count(order.begin(), order.end(), e), 1) << e;
  }
  return order;
}

TEST(Prompt, CanonicalExamples) {
  EXPECT_EQ(prompt_examples(SubtypeKind::kSubgroup), kSubgroupExamples);
  EXPECT_EQ(prompt_examples(SubtypeKind::kIndividual), kIndividualExamples);
}

TEST(Prompt, EveryPermutationKeepsTemplate) {
  for (auto [kind, examples] : {std::pair{SubtypeKind::kSubgroup, &kSubgroupExamples},
                                std::pair{SubtypeKind::kIndividual, &kIndividualExamples}}) {
    std::set<std::vector<std::string>> orders;
    for (std::uint64_t seed = 0; seed < 3000 && orders.size() < 120; ++seed) {
      orders.insert(check_template(build_prompt("women", kind, seed), "women", *examples));
    }
    EXPECT_EQ(orders.size(), 120u);
  }
}

TEST(Prompt, DeterministicPerSeedAndGroup) {
  EXPECT_EQ(build_prompt("women", SubtypeKind::kSubgroup, 5),
            build_prompt("women", SubtypeKind::kSubgroup, 5));
  std::set<std::string> bodies;
  for (const char* g : {"a", "b", "c", "d", "e", "f"}) {
    std::string p = build_prompt(g, SubtypeKind::kSubgroup, 5);
    bodies.insert(p.substr(0, p.rfind('\n')));
  }
  EXPECT_GT(bodies.size(), 1u);
}

TEST(ParseSubtypes, ReadsNumberedItemsUntilSeparator) {
  auto subs = parse_subtypes("\n1. Businesswomen\n2) female atheletes.\n3. Women\n##\n4. late",
                             "women", SubtypeKind::kSubgroup);
  ASSERT_EQ(subs.size(), 2u);
  EXPECT_EQ(subs[0].surface, "businesswomen");
  EXPECT_EQ(subs[1].surface, "female atheletes");
  EXPECT_EQ(subs[0].kind, SubtypeKind::kSubgroup);
}

TEST(ParseSubtypes, KeepsAtMostN) {
  auto subs = parse_subtypes("1. a\n2. b\n3. c\n4. d\n5. e\n6. f\n7. g", "x",
                             SubtypeKind::kIndividual, 5);
  EXPECT_EQ(subs.size(), 5u);
}

TEST(ParseSubtypes, FuzzedSelfFilter) {
  SeededRng rng(2024);
  const std::vector<std::string> pool = {"women", "Women", " WOMEN ", "women.", "female pilots",
                                         "nurses", "nurses", "moms, dads", "a: b", "", "queens"};
  for (int round = 0; round < 500; ++round) {
    std::string completion = "\n";
    const size_t n = rng.below(9);
    for (size_t i = 0; i < n; ++i) {
      completion += std::to_string(i + 1) + ". " + pool[rng.below(pool.size())] + "\n";
    }
    if (rng.below(2)) completion += "##\n1. women\n";
    auto subs = parse_subtypes(completion, "women", SubtypeKind::kSubgroup);
    std::set<std::string> seen;
    EXPECT_LE(subs.size(), 5u);
    for (const auto& s : subs) {
      EXPECT_NE(s.surface, "women") << completion;
      EXPECT_FALSE(s.surface.empty());
      EXPECT_EQ(s.surface.find_first_of(",:;"), std::string::npos);
      EXPECT_TRUE(seen.insert(s.surface).second) << "duplicate " << s.surface;
    }
  }
}

TEST(Rank, MatchesSortOracleOnRandomSets) {
  const Generic g = parse_generic("Women are sex objects.", GroupLexicon::defaults());
  SeededRng rng(77);
  for (int round = 0; round < 50; ++round) {
    std::map<std::string, double> table;
    std::vector<Subtype> candidates;
    std::vector<std::pair<std::string, double>> oracle_in;
    const size_t n = 1 + rng.below(8);
    for (size_t i = 0; i < n; ++i) {
      const std::string name = "cand" + std::to_string(round) + "_" + std::to_string(i);
      // Coarse scores so ties are common.
      const double score = static_cast<double>(rng.below(4)) / 4.0;
      table[name] = score;
      candidates.push_back({name, SubtypeKind::kSubgroup, 0});
      oracle_in.emplace_back(name, score);
    }
    auto ranked = rank_subtypes(g, candidates, TableScorer(table));
    std::vector<std::string> got;
    for (const auto& s : ranked) got.push_back(s.surface);
    EXPECT_EQ(got, oracle::sort_by_score(oracle_in));
    for (const auto& s : ranked) EXPECT_EQ(s.score, table[s.surface]);
  }
}

TEST(Rank, ScoresTheExceptionSentence) {
  const Generic g = parse_generic("Black people don't work", GroupLexicon::defaults());
  EXPECT_EQ(exception_sentence(g, "barack obama"), "barack obama work.");
}

class ThrowingScorer : public TruthScorer {
 public:
  double score(std::string_view s) const override {
    if (s.rfind("bad", 0) == 0) throw std::runtime_error("model crashed");
    if (s.rfind("huge", 0) == 0) return 7.0;
    return 0.5;
  }
  std::string id() const override { return "throwing"; }
};

TEST(Rank, ScorerFailureNamesCandidate) {
  const Generic g = parse_generic("Women are sex objects.", GroupLexicon::defaults());
  try {
    rank_subtypes(g, {{"ok", SubtypeKind::kSubgroup, 0}, {"bad one", SubtypeKind::kSubgroup, 0}},
                  ThrowingScorer());
    FAIL();
  } catch (const ScorerFailure& e) {
    EXPECT_EQ(e.candidate(), "bad one");
  }
  EXPECT_THROW(rank_subtypes(g, {{"huge", SubtypeKind::kSubgroup, 0}}, ThrowingScorer()),
               ScorerFailure);
}

TEST(KnownGood, ScoresListedCandidatesHigher) {
  KnownGoodScorer scorer({"businesswomen"});
  EXPECT_EQ(scorer.score("businesswomen are not sex objects."), 1.0);
  EXPECT_EQ(scorer.score("housewives are not sex objects."), 0.5);
  EXPECT_NE(scorer.id(), KnownGoodScorer({}).id());
}

TEST(Retry, RecoversFromTransientFailures) {
  ScriptedClient client;
  client.push([]() -> std::vector<std::string> { throw TransportError("503"); });
  client.push([]() -> std::vector<std::string> { throw TransportError("timeout"); });
  client.push_text("1. a");
  RecordingSleeper sleeper;
  auto out = complete("p", {}, client, RetryPolicy{}, sleeper.fn());
  EXPECT_EQ(out, std::vector<std::string>{"1. a"});
  EXPECT_EQ(client.calls(), 3);
  ASSERT_EQ(sleeper.waits.size(), 2u);
  EXPECT_EQ(sleeper.waits[0].count(), 250);
  EXPECT_EQ(sleeper.waits[1].count(), 500);
}

TEST(Retry, GivesUpAfterMaxAttempts) {
  ScriptedClient client;
  for (int i = 0; i < 5; ++i) {
    client.push([]() -> std::vector<std::string> { throw TransportError("503"); });
  }
  RecordingSleeper sleeper;
  EXPECT_THROW(complete("p", {}, client, RetryPolicy{}, sleeper.fn()), TransportError);
  EXPECT_EQ(client.calls(), 3);
}

TEST(Retry, AuthErrorIsNotRetried) {
  ScriptedClient client;
  client.push([]() -> std::vector<std::string> { throw AuthError("401"); });
  RecordingSleeper sleeper;
  EXPECT_THROW(complete("p", {}, client, RetryPolicy{}, sleeper.fn()), AuthError);
  EXPECT_EQ(client.calls(), 1);
  EXPECT_TRUE(sleeper.waits.empty());
}

TEST(Cache, HitNeverReachesClient) {
  const Generic g = parse_generic("Women are sex objects.", GroupLexicon::defaults());
  ScriptedClient client;
  client.push_text("1. businesswomen\n2. nurses\n3. female pilots\n##");
  SubtypeCache cache;
  KnownGoodScorer scorer({"nurses"});
  SubtypeRequest req{"women", SubtypeKind::kSubgroup, 1, {}, {}};
  RecordingSleeper sleeper;
  auto first = subtypes_for(req, client, scorer, g, cache, sleeper.fn());
  auto second = subtypes_for(req, client, scorer, g, cache, sleeper.fn());
  EXPECT_EQ(first, second);
  EXPECT_EQ(client.calls(), 1);
  ASSERT_EQ(first.size(), 3u);
  EXPECT_EQ(first[0].surface, "nurses");
}

TEST(Cache, CandidatesSharedAcrossGenericsOfOneGroup) {
  const GroupLexicon lex = GroupLexicon::defaults();
  ScriptedClient client;
  client.push_text("1. a\n2. b\n3. c");
  SubtypeCache cache;
  KnownGoodScorer scorer({});
  SubtypeRequest req{"women", SubtypeKind::kSubgroup, 1, {}, {}};
  RecordingSleeper sleeper;
  subtypes_for(req, client, scorer, parse_generic("Women are weak", lex), cache, sleeper.fn());
  subtypes_for(req, client, scorer, parse_generic("Women are loud", lex), cache, sleeper.fn());
  EXPECT_EQ(client.calls(), 1);
}

TEST(Cache, PersistsOnDisk) {
  TempDir dir;
  const Generic g = parse_generic("Women are sex objects.", GroupLexicon::defaults());
  KnownGoodScorer scorer({});
  SubtypeRequest req{"women", SubtypeKind::kIndividual, 3, {}, {}};
  RecordingSleeper sleeper;
  std::vector<Subtype> first;
  {
    SubtypeCache cache(dir.path());
    ScriptedClient client;
    client.push_text("1. Ellen DeGeneres\n2. sarah palin\n3. rachel maddow");
    first = subtypes_for(req, client, scorer, g, cache, sleeper.fn());
  }
  SubtypeCache reopened(dir.path());
  OfflineClient offline;
  EXPECT_EQ(subtypes_for(req, offline, scorer, g, reopened, sleeper.fn()), first);
  SubtypeRequest other = req;
  other.seed = 4;
  EXPECT_THROW(subtypes_for(other, offline, scorer, g, reopened, sleeper.fn()), CacheMiss);
}

TEST(Cache, ConcurrentPutsLeaveReadableEntries) {
  TempDir dir;
  SubtypeCache cache(dir.path());
  std::vector<std::jthread> threads;
  for (int t = 0; t < 8; ++t) {
    threads.emplace_back([&cache, t] {
      for (int i = 0; i < 50; ++i) {
        cache.put("key" + std::to_string(i % 5),
                  {{"s" + std::to_string(t), SubtypeKind::kSubgroup, 0.5}});
      }
    });
  }
  threads.clear();
  SubtypeCache reopened(dir.path());
  for (int i = 0; i < 5; ++i) {
    auto v = reopened.get("key" + std::to_string(i));
    ASSERT_TRUE(v);
    EXPECT_EQ(v->size(), 1u);
  }
}

TEST(Cache, KeysSeparateKindSeedAndScorer) {
  const Generic g = parse_generic("Women are sex objects.", GroupLexicon::defaults());
  std::set<std::string> keys{
      SubtypeCache::candidates_key("women", SubtypeKind::kSubgroup, 1),
      SubtypeCache::candidates_key("women", SubtypeKind::kIndividual, 1),
      SubtypeCache::candidates_key("women", SubtypeKind::kSubgroup, 2),
      SubtypeCache::ranked_key("women", SubtypeKind::kSubgroup, 1, "s1", g),
      SubtypeCache::ranked_key("women", SubtypeKind::kSubgroup, 1, "s2", g)};
  EXPECT_EQ(keys.size(), 5u);
}

TEST(FixtureClient, AnswersFromPromptGroupAndKind) {
  FixtureCompletionClient client(testing::fixture_dir() / "completions");
  auto out = client.complete(build_prompt("black people", SubtypeKind::kIndividual, 9), {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_NE(out[0].find("Barack Obama"), std::string::npos);
  EXPECT_THROW(client.complete(build_prompt("aliens", SubtypeKind::kSubgroup, 9), {}),
               TransportError);
}

TEST(OfflineClient, AlwaysMisses) {
  OfflineClient client;
  EXPECT_THROW(client.complete(build_prompt("women", SubtypeKind::kSubgroup, 1), {}), CacheMiss);
}

// A local stand-in for the completion endpoint.
class FakeEndpoint {
 public:
  explicit FakeEndpoint(std::function<void(const httplib::Request&, httplib::Response&)> h) {
    server_.Post("/v1/completions", std::move(h));
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeEndpoint() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

TEST(HttpClient, SendsParametersAndParsesChoices) {
  nlohmann::json seen;
  std::string auth;
  FakeEndpoint endpoint([&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(R"({"choices":[{"text":"\n1. nurses"}]})", "application/json");
  });
  HttpClientConfig config;
  config.base_url = endpoint.url();
  config.api_key = "k";
  HttpCompletionClient client(config);
  auto out = client.complete("prompt text", CompletionParams{});
  EXPECT_EQ(out, std::vector<std::string>{"\n1. nurses"});
  EXPECT_EQ(auth, "Bearer k");
  EXPECT_EQ(seen["prompt"], "prompt text");
  EXPECT_DOUBLE_EQ(seen["top_p"].get<double>(), 0.9);
  EXPECT_DOUBLE_EQ(seen["temperature"].get<double>(), 0.8);
  EXPECT_EQ(seen["max_tokens"], 100);
}

TEST(HttpClient, MapsStatuses) {
  std::atomic<int> status{401};
  FakeEndpoint endpoint([&](const httplib::Request&, httplib::Response& res) {
    res.status = status.load();
    res.set_content("{}", "application/json");
  });
  HttpClientConfig config;
  config.base_url = endpoint.url();
  HttpCompletionClient client(config);
  EXPECT_THROW(client.complete("p", {}), AuthError);
  status = 503;
  try {
    client.complete("p", {});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.retriable());
  }
  status = 400;
  try {
    client.complete("p", {});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_FALSE(e.retriable());
  }
}

TEST(HttpClient, RetriesThroughServerErrors) {
  std::atomic<int> hits{0};
  FakeEndpoint endpoint([&](const httplib::Request&, httplib::Response& res) {
    if (++hits < 3) {
      res.status = 500;
      return;
    }
    res.set_content(R"({"choices":[{"text":"1. x"}]})", "application/json");
  });
  HttpClientConfig config;
  config.base_url = endpoint.url();
  HttpCompletionClient client(config);
  RecordingSleeper sleeper;
  EXPECT_EQ(complete("p", {}, client, RetryPolicy{}, sleeper.fn()).size(), 1u);
  EXPECT_EQ(hits.load(), 3);
}

TEST(HttpClient, UnreachableIsRetriableTransport) {
  HttpClientConfig config;
  config.base_url = "http://127.0.0.1:1/v1";
  config.timeout = std::chrono::seconds(2);
  HttpCompletionClient client(config);
  try {
    client.complete("p", {});
    FAIL();
  } catch (const TransportError& e) {
    EXPECT_TRUE(e.retriable());
  }
}

}  // namespace
}  // namespace countering
