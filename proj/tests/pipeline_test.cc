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

#include <fstream>
#include <sstream>

#include "countering/completion_clients.h"
#include "countering/errors.h"
#include "countering/pipeline.h"
#include "support/test_support.h"

namespace countering {
namespace {

using testing::fixture_dir;
using testing::read_file;
using testing::RecordingSleeper;
using testing::ScriptedClient;
using testing::TempDir;

constexpr std::uint64_t kGoldenSeed = 1729;

std::string run_mock(int jobs, SubtypeCache& cache) {
  FixtureCompletionClient client(fixture_dir() / "completions");
  const KnownGoodScorer scorer = KnownGoodScorer::load(fixture_dir() / "known_good.txt");
  GenerationOptions options;
  options.seed = kGoldenSeed;
  options.jobs = jobs;
  RecordingSleeper sleeper;
  auto result = generate_countersets(load_pairs(fixture_dir() / "golden" / "pairs.jsonl"),
                                     GroupLexicon::defaults(), AltGroupMap::defaults(), client,
                                     scorer, cache, options, sleeper.fn());
  EXPECT_EQ(result.succeeded, 4u);
  EXPECT_TRUE(result.diagnostics.empty());
  std::ostringstream out;
  write_counters(out, result.entries);
  return out.str();
}

TEST(Generate, MockRunMatchesGoldenFile) {
  SubtypeCache cache;
  EXPECT_EQ(run_mock(4, cache), read_file(fixture_dir() / "golden" / "counters.jsonl"));
}

TEST(Generate, IndependentOfWorkerCount) {
  SubtypeCache a;
  SubtypeCache b;
  EXPECT_EQ(run_mock(1, a), run_mock(8, b));
}

TEST(Generate, OfflineColdCacheReportsMisses) {
  OfflineClient client;
  SubtypeCache cache;
  RecordingSleeper sleeper;
  auto result = generate_countersets(load_pairs(fixture_dir() / "golden" / "pairs.jsonl"),
                                     GroupLexicon::defaults(), AltGroupMap::defaults(), client,
                                     KnownGoodScorer({}), cache, {}, sleeper.fn());
  ASSERT_FALSE(result.diagnostics.empty());
  for (const auto& d : result.diagnostics) {
    EXPECT_NE(d.message.find("cache miss"), std::string::npos) << d.message;
  }
  // Lots and Tol never depend on the client.
  for (const auto& e : result.entries) {
    ASSERT_TRUE(e.counters);
    EXPECT_TRUE(e.counters->find(CounterKind::kLots));
    EXPECT_TRUE(e.counters->find(CounterKind::kTol));
    EXPECT_FALSE(e.counters->find(CounterKind::kDirGrp));
  }
}

TEST(Generate, OfflineWarmCacheReproducesOnlineRun) {
  TempDir dir;
  std::string online;
  {
    SubtypeCache cache(dir.path());
    online = run_mock(2, cache);
  }
  SubtypeCache cache(dir.path());
  OfflineClient client;
  GenerationOptions options;
  options.seed = kGoldenSeed;
  RecordingSleeper sleeper;
  auto result = generate_countersets(load_pairs(fixture_dir() / "golden" / "pairs.jsonl"),
                                     GroupLexicon::defaults(), AltGroupMap::defaults(), client,
                                     KnownGoodScorer::load(fixture_dir() / "known_good.txt"),
                                     cache, options, sleeper.fn());
  std::ostringstream out;
  write_counters(out, result.entries);
  EXPECT_EQ(out.str(), online);
}

TEST(Generate, UnparseablePairIsRecordedNotFatal) {
  std::vector<StereotypePair> pairs = {{"p", "Aliens are green", "aliens", 2, {}},
                                       {"p", "Women are loud", "Women", 2, {}}};
  ScriptedClient client;
  for (int i = 0; i < 2; ++i) client.push_text("1. a\n2. b\n3. c");
  SubtypeCache cache;
  RecordingSleeper sleeper;
  GenerationOptions options;
  options.jobs = 1;
  auto result = generate_countersets(pairs, GroupLexicon::defaults(), AltGroupMap::defaults(),
                                     client, KnownGoodScorer({}), cache, options, sleeper.fn());
  EXPECT_FALSE(result.entries[0].counters);
  EXPECT_FALSE(result.entries[0].error.empty());
  EXPECT_TRUE(result.entries[1].counters);
  EXPECT_EQ(result.succeeded, 1u);
}

TEST(Generate, OverridesReplaceParsing) {
  TempDir dir;
  std::ofstream(dir / "overrides.tsv") << "Aliens are green\twomen\tare\tgreen\n";
  GenerationOptions options;
  options.overrides = load_overrides(dir / "overrides.tsv");
  OfflineClient client;
  SubtypeCache cache;
  RecordingSleeper sleeper;
  auto result = generate_countersets({{"p", "Aliens are green", "aliens", 2, {}}},
                                     GroupLexicon::defaults(), AltGroupMap::defaults(), client,
                                     KnownGoodScorer({}), cache, options, sleeper.fn());
  ASSERT_TRUE(result.entries[0].counters);
  EXPECT_EQ(result.entries[0].counters->find(CounterKind::kAlt)->body,
            "Men can also be green.");
}

TEST(Generate, AuthErrorAbortsRun) {
  ScriptedClient client;
  client.push([]() -> std::vector<std::string> { throw AuthError("bad key"); });
  SubtypeCache cache;
  RecordingSleeper sleeper;
  GenerationOptions options;
  options.jobs = 1;
  EXPECT_THROW(generate_countersets({{"p", "Women are loud", "Women", 2, {}}},
                                    GroupLexicon::defaults(), AltGroupMap::defaults(), client,
                                    KnownGoodScorer({}), cache, options, sleeper.fn()),
               AuthError);
}

TEST(CountersFile, RoundTrips) {
  auto entries = load_counters(fixture_dir() / "golden" / "counters.jsonl");
  ASSERT_EQ(entries.size(), 4u);
  std::ostringstream out;
  write_counters(out, entries);
  EXPECT_EQ(out.str(), read_file(fixture_dir() / "golden" / "counters.jsonl"));
  const auto* alt = entries[0].counters->find(CounterKind::kAlt);
  ASSERT_TRUE(alt);
  EXPECT_EQ(alt->source_generic, entries[0].counters->generic);
}

}  // namespace
}  // namespace countering
