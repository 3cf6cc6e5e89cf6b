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

#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include "countering/cli.h"
#include "support/test_support.h"

namespace countering {
namespace {

namespace fs = std::filesystem;
using testing::fixture_dir;
using testing::read_file;
using testing::TempDir;

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  f << text;
}

std::vector<std::string> generate_args(const TempDir& dir, const fs::path& pairs) {
  return {"generate", "--pairs", pairs.string(), "--counters", (dir / "counters.jsonl").string(),
          "--mock", (fixture_dir() / "completions").string(), "--known-good",
          (fixture_dir() / "known_good.txt").string()};
}

TEST(Cli, HelpAndBadArgs) {
  EXPECT_EQ(cli({"--help"}).code, cli::kExitOk);
  EXPECT_EQ(cli({"frobnicate"}).code, cli::kExitInput);
  EXPECT_EQ(cli({"ingest"}).code, cli::kExitInput);
  EXPECT_EQ(cli({"generate", "--pairs", "/nonexistent", "--counters", "x"}).code, cli::kExitInput);
}

TEST(Cli, IngestEmptyFile) {
  TempDir dir;
  write(dir / "empty.csv", "");
  auto r = cli({"ingest", "--input", (dir / "empty.csv").string(), "--pairs",
                (dir / "pairs.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("no rows"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(dir / "pairs.jsonl"));
}

TEST(Cli, IngestHeaderOnlyHasNoPairs) {
  TempDir dir;
  write(dir / "h.csv", "post,targetMinority,targetStereotype,WorkerId\n");
  auto r = cli({"ingest", "--input", (dir / "h.csv").string(), "--pairs",
                (dir / "pairs.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitEmpty);
}

TEST(Cli, IngestFixture) {
  TempDir dir;
  auto r = cli({"ingest", "--input", (fixture_dir() / "corpus.csv").string(), "--pairs",
                (dir / "pairs.jsonl").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(read_file(dir / "pairs.jsonl"), read_file(fixture_dir() / "golden" / "pairs.jsonl"));
  EXPECT_NE(r.out.find("posts: 7, posts with enough annotations: 6"), std::string::npos) << r.out;
}

TEST(Cli, GenerateMatchesGolden) {
  TempDir dir;
  auto r = cli(generate_args(dir, fixture_dir() / "golden" / "pairs.jsonl"));
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(read_file(dir / "counters.jsonl"),
            read_file(fixture_dir() / "golden" / "counters.jsonl"));
  EXPECT_NE(r.out.find("4 of 4 pairs countered"), std::string::npos) << r.out;
}

TEST(Cli, GenerateOfflineColdCache) {
  TempDir dir;
  fs::create_directories(dir / "cache");
  auto r = cli({"generate", "--pairs", (fixture_dir() / "golden" / "pairs.jsonl").string(),
                "--counters", (dir / "counters.jsonl").string(), "--offline", "--cache",
                (dir / "cache").string()});
  // Templates that need no subtypes still go through.
  EXPECT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_NE(r.err.find("cache miss"), std::string::npos) << r.err;
  EXPECT_NE(read_file(dir / "counters.jsonl").find("cache miss"), std::string::npos);
}

TEST(Cli, GenerateWarmCacheMatchesMock) {
  TempDir dir;
  auto args = generate_args(dir, fixture_dir() / "golden" / "pairs.jsonl");
  args.insert(args.end(), {"--cache", (dir / "cache").string()});
  ASSERT_EQ(cli(args).code, cli::kExitOk);
  const std::string first = read_file(dir / "counters.jsonl");
  auto r = cli({"generate", "--pairs", (fixture_dir() / "golden" / "pairs.jsonl").string(),
                "--counters", (dir / "counters.jsonl").string(), "--offline", "--cache",
                (dir / "cache").string(), "--known-good",
                (fixture_dir() / "known_good.txt").string()});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(read_file(dir / "counters.jsonl"), first);
}

TEST(Cli, GenerateWithoutKeyIsInputError) {
  TempDir dir;
  unsetenv("COUNTERING_API_KEY");
  auto r = cli({"generate", "--pairs", (fixture_dir() / "golden" / "pairs.jsonl").string(),
                "--counters", (dir / "c.jsonl").string()});
  EXPECT_EQ(r.code, cli::kExitInput);
}

TEST(Cli, ServeMissingCounters) {
  TempDir dir;
  auto r = cli({"serve", "--counters", (dir / "nope.jsonl").string(), "--store",
                (dir / "store").string()});
  EXPECT_EQ(r.code, cli::kExitInput);
}

TEST(Cli, ReportMissingStore) {
  TempDir dir;
  fs::create_directories(dir / "store");
  auto r = cli({"report", "--store", (dir / "store").string(), "--out", (dir / "out").string()});
  EXPECT_EQ(r.code, cli::kExitInput);
}

// serve, robots and report in-process over a real socket.
class CliStudy : public ::testing::Test {
 protected:
  TempDir dir;

  void study(double failure_rate, const std::string& store) {
    auto counters = fixture_dir() / "golden" / "counters.jsonl";
    auto port_file = dir / (store + ".port");
    CliRun serve_result{};
    std::thread server([&] {
      serve_result = cli({"serve", "--counters", counters.string(), "--store",
                          (dir / store).string(), "--port", "0", "--port-file",
                          port_file.string()});
    });
    int port = 0;
    auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(10);
    while (std::chrono::steady_clock::now() < deadline) {
      if (fs::exists(port_file)) {
        std::ifstream f(port_file);
        if (f >> port && port > 0) break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    ASSERT_GT(port, 0) << "server did not come up";
    auto robots = cli({"robots", "--url", "http://127.0.0.1:" + std::to_string(port),
                       "--annotators", "9", "--seed", "11", "--attention-failure-rate",
                       std::to_string(failure_rate)});
    cli::request_shutdown();
    server.join();
    ASSERT_EQ(robots.code, cli::kExitOk) << robots.err;
    ASSERT_EQ(serve_result.code, cli::kExitOk) << serve_result.err;
    EXPECT_NE(serve_result.out.find("stopped"), std::string::npos);
  }

  CliRun report(const std::string& store, const std::string& out,
             std::vector<std::string> extra = {}) {
    std::vector<std::string> args = {"report", "--store", (dir / store).string(), "--out",
                                     (dir / out).string()};
    args.insert(args.end(), extra.begin(), extra.end());
    return cli(args);
  }
};

TEST_F(CliStudy, EndToEndIsReproducible) {
  ASSERT_NO_FATAL_FAILURE(study(0.1, "s1"));
  ASSERT_NO_FATAL_FAILURE(study(0.1, "s2"));
  auto a = report("s1", "r1");
  auto b = report("s2", "r2");
  ASSERT_EQ(a.code, cli::kExitOk) << a.err;
  ASSERT_EQ(b.code, cli::kExitOk) << b.err;
  EXPECT_NE(a.out.find("wrote 10 files"), std::string::npos) << a.out;
  for (const char* f : {"preference.json", "agreement.json", "demographics.json", "report.txt",
                        "first_choice.svg", "second_choice.svg", "incorrect.svg",
                        "agreement.svg", "race.svg", "gender.svg"}) {
    EXPECT_EQ(read_file(dir / "r1" / f), read_file(dir / "r2" / f)) << f;
  }
  auto pref = nlohmann::json::parse(read_file(dir / "r1" / "preference.json"));
  EXPECT_EQ(pref["settings"].size(), 3u);

  auto only = report("s1", "r3", {"--setting", "stereo", "--no-charts"});
  ASSERT_EQ(only.code, cli::kExitOk) << only.err;
  pref = nlohmann::json::parse(read_file(dir / "r3" / "preference.json"));
  ASSERT_EQ(pref["settings"].size(), 1u);
  EXPECT_EQ(pref["settings"][0]["setting"], "stereo");
  EXPECT_FALSE(fs::exists(dir / "r3" / "race.svg"));

  EXPECT_EQ(report("s1", "r4", {"--setting", "sideways"}).code, cli::kExitInput);
}

TEST_F(CliStudy, OnlyDiscardedRecordsIsEmpty) {
  ASSERT_NO_FATAL_FAILURE(study(1.0, "s"));
  auto r = report("s", "r");
  EXPECT_EQ(r.code, cli::kExitEmpty) << r.out << r.err;
}

}  // namespace
}  // namespace countering
