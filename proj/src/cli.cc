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

#include "countering/cli.h"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "countering/analytics.h"
#include "countering/charts.h"
#include "countering/completion_clients.h"
#include "countering/corpus.h"
#include "countering/errors.h"
#include "countering/event_log.h"
#include "countering/pipeline.h"
#include "countering/robots.h"
#include "countering/study.h"
#include "countering/study_server.h"
#include "countering/text.h"
#include "json.hpp"

namespace countering::cli {

namespace {

namespace fs = std::filesystem;

std::atomic<bool> g_shutdown{false};

void write_file_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError(fmt::format("cannot write {}", tmp.string()));
    out << content;
    if (!out) throw InputError(fmt::format("write to {} failed", tmp.string()));
  }
  fs::rename(tmp, path);
}

std::vector<StudySetting> parse_settings(const std::vector<std::string>& names) {
  std::vector<StudySetting> out;
  for (const auto& n : names) {
    auto s = parse_setting(n);
    if (!s) throw InputError(fmt::format("unknown setting '{}'", n));
    out.push_back(*s);
  }
  return out;
}

GroupLexicon lexicon_from(const std::string& path) {
  return path.empty() ? GroupLexicon::defaults() : GroupLexicon::load(path);
}

struct IngestArgs {
  std::string input, columns, lexicon, pairs;
};

int cmd_ingest(const IngestArgs& a, std::ostream& out) {
  const ColumnMapping mapping = a.columns.empty() ? ColumnMapping{} : ColumnMapping::load(a.columns);
  const GroupLexicon lexicon = lexicon_from(a.lexicon);
  IngestReport read_report;
  std::vector<RawAnnotationRow> rows;
  try {
    rows = read_annotation_rows(a.input, mapping, read_report);
  } catch (const EmptyInput& e) {
    // An empty corpus is a bad input, not an empty result.
    throw InputError(e.what());
  }
  ExtractionResult result = extract_pairs(rows, lexicon);
  std::ostringstream pairs;
  write_pairs(pairs, result.pairs);
  write_file_atomic(a.pairs, pairs.str());

  out << format_group_table(group_counts(result.pairs));
  out << fmt::format("rows read: {}, malformed: {}, posts: {}, posts with enough annotations: {}\n",
                     read_report.rows_read, read_report.malformed_rows, result.report.posts,
                     result.report.posts_with_enough_annotations);
  return result.pairs.empty() ? kExitEmpty : kExitOk;
}

struct GenerateArgs {
  std::string pairs, counters, lexicon, alt_map, cache, mock, known_good, overrides;
  bool offline = false;
  unsigned long long seed = kDefaultSeed;
  int jobs = 4;
};

int cmd_generate(const GenerateArgs& a, std::ostream& out, std::ostream& err) {
  const GroupLexicon lexicon = lexicon_from(a.lexicon);
  const AltGroupMap alt = a.alt_map.empty() ? AltGroupMap::defaults() : AltGroupMap::load(a.alt_map);
  const auto pairs = load_pairs(a.pairs);

  std::unique_ptr<CompletionClient> client;
  if (!a.mock.empty()) {
    client = std::make_unique<FixtureCompletionClient>(a.mock);
  } else if (a.offline) {
    client = std::make_unique<OfflineClient>();
  } else {
    HttpClientConfig config = HttpClientConfig::from_env();
    if (config.api_key.empty()) {
      throw InputError("COUNTERING_API_KEY is not set; use --mock or --offline to run without it");
    }
    client = std::make_unique<HttpCompletionClient>(std::move(config));
  }
  const KnownGoodScorer scorer =
      a.known_good.empty() ? KnownGoodScorer({}) : KnownGoodScorer::load(a.known_good);
  SubtypeCache cache(a.cache.empty() ? std::nullopt : std::optional<fs::path>(a.cache));

  GenerationOptions options;
  options.seed = a.seed;
  options.jobs = a.jobs;
  if (!a.overrides.empty()) options.overrides = load_overrides(a.overrides);

  GenerationResult result =
      generate_countersets(pairs, lexicon, alt, *client, scorer, cache, options);
  std::ostringstream body;
  write_counters(body, result.entries);
  write_file_atomic(a.counters, body.str());

  for (const auto& d : result.diagnostics) {
    err << fmt::format("pair {}: {}\n", d.pair_index, d.message);
  }
  out << fmt::format("{} of {} pairs countered, {} diagnostics\n", result.succeeded,
                     pairs.size(), result.diagnostics.size());
  if (result.succeeded > 0) return kExitOk;
  return result.transport_failures > 0 ? kExitTransport : kExitEmpty;
}

struct ServeArgs {
  std::string counters, store, host = "127.0.0.1", port_file, salt_file;
  int port = 8080;
  unsigned long long seed = kDefaultSeed;
  std::vector<std::string> settings;
};

int cmd_serve(const ServeArgs& a, std::ostream& out, std::ostream& err) {
  g_shutdown = false;
  if (!a.port_file.empty()) fs::remove(a.port_file);

  const auto entries = load_counters(a.counters);
  std::vector<StudySetting> settings = a.settings.empty()
      ? std::vector<StudySetting>(kAllSettings.begin(), kAllSettings.end())
      : parse_settings(a.settings);
  auto tasks = build_study(entries, settings, a.seed);
  if (tasks.empty()) throw EmptyInput(fmt::format("{} holds no usable counter sets", a.counters));

  ServiceConfig config;
  if (!a.salt_file.empty()) {
    std::ifstream in(a.salt_file);
    if (!in) throw InputError(fmt::format("cannot open {}", a.salt_file));
    std::string salt((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    config.salt = text::trim(salt);
    if (config.salt.empty()) throw InputError(fmt::format("{} is empty", a.salt_file));
  }
  auto service = StudyService::open(a.store, std::move(tasks), std::move(config));

  StudyServer server(*service);
  const int port = server.bind(a.host, a.port);
  if (port < 0) {
    err << fmt::format("error: cannot listen on {}:{}\n", a.host, a.port);
    return kExitTransport;
  }
  if (!a.port_file.empty()) write_file_atomic(a.port_file, fmt::format("{}\n", port));
  out << fmt::format("serving {} tasks on http://{}:{}\n", service->tasks().size(), a.host, port)
      << std::flush;

  std::jthread watcher([&server](std::stop_token stop) {
    while (!stop.stop_requested() && !g_shutdown.load()) {
      std::this_thread::sleep_for(std::chrono::milliseconds(50));
    }
    server.stop();
  });
  const bool ok = server.listen();
  watcher.request_stop();
  watcher.join();
  if (!ok && !g_shutdown.load()) {
    err << "error: listener failed\n";
    return kExitTransport;
  }
  out << "stopped\n";
  return kExitOk;
}

struct RobotArgs {
  std::string url;
  int annotators = 9;
  unsigned long long seed = kDefaultSeed;
  double failure_rate = 0.05;
  std::vector<std::string> settings;
};

int cmd_robots(const RobotArgs& a, std::ostream& out) {
  RobotConfig config;
  config.url = a.url;
  config.annotators = a.annotators;
  config.seed = a.seed;
  config.attention_failure_rate = a.failure_rate;
  if (!a.settings.empty()) config.settings = parse_settings(a.settings);
  RobotSummary s = run_robots(config);
  out << fmt::format("submitted {}, accepted {}, discarded {}, rejected {}\n", s.submitted,
                     s.accepted, s.discarded, s.rejected);
  return kExitOk;
}

struct ReportArgs {
  std::string store, out;
  std::vector<std::string> settings;
  bool no_charts = false;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  auto service = StudyService::load(a.store);
  const auto records = service->export_annotations();
  const auto profiles = service->export_profiles();
  const auto lookup = service->task_index();
  std::optional<std::vector<StudySetting>> settings;
  if (!a.settings.empty()) settings = parse_settings(a.settings);

  const PreferenceReport pref = preference_report(records, lookup, settings);
  const AgreementReport agreement = agreement_report(records, lookup, settings);
  const DemographicsReport demo = demographics_report(records, profiles, lookup, settings);

  const fs::path dir = a.out;
  std::vector<std::pair<std::string, std::string>> files{
      {"preference.json", to_json(pref).dump(2) + "\n"},
      {"agreement.json", to_json(agreement).dump(2) + "\n"},
      {"demographics.json", to_json(demo).dump(2) + "\n"},
      {"report.txt", "== preference ==\n" + format_text(pref) + "== agreement ==\n" +
                         format_text(agreement) + "\n== demographics ==\n" + format_text(demo)},
  };
  if (!a.no_charts) {
    files.emplace_back("first_choice.svg", render_svg(first_choice_chart(pref)));
    files.emplace_back("second_choice.svg", render_svg(second_choice_chart(pref)));
    files.emplace_back("incorrect.svg", render_svg(incorrect_chart(pref)));
    files.emplace_back("agreement.svg", render_svg(agreement_chart(agreement)));
    files.emplace_back("race.svg", render_svg(race_chart(demo)));
    files.emplace_back("gender.svg", render_svg(gender_chart(demo)));
  }
  for (const auto& [name, content] : files) write_file_atomic(dir / name, content);
  out << fmt::format("wrote {} files to {}\n", files.size(), dir.string());
  return kExitOk;
}

}  // namespace

void request_shutdown() { g_shutdown = true; }

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Counterstatement generation and annotation study toolkit", "countering"};
  app.require_subcommand(1);

  IngestArgs ingest;
  auto* ing = app.add_subcommand("ingest", "Extract stereotype pairs from an annotated corpus");
  ing->add_option("--input", ingest.input, "CSV or TSV corpus")->required()->check(CLI::ExistingFile);
  ing->add_option("--columns", ingest.columns, "field<TAB>column mapping")->check(CLI::ExistingFile);
  ing->add_option("--lexicon", ingest.lexicon, "raw<TAB>normalized group names")->check(CLI::ExistingFile);
  ing->add_option("--pairs", ingest.pairs, "Output pairs file")->required();

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate counterstatements for each pair");
  g->add_option("--pairs", gen.pairs, "Pairs file")->required()->check(CLI::ExistingFile);
  g->add_option("--counters", gen.counters, "Output counterstatements file")->required();
  g->add_option("--lexicon", gen.lexicon)->check(CLI::ExistingFile);
  g->add_option("--alt-map", gen.alt_map, "group<TAB>alternative group")->check(CLI::ExistingFile);
  g->add_option("--cache", gen.cache, "Subtype cache directory");
  g->add_option("--mock", gen.mock, "Directory of canned completions")->check(CLI::ExistingDirectory);
  g->add_option("--known-good", gen.known_good, "Known-good subtypes, one per line")->check(CLI::ExistingFile);
  g->add_option("--overrides", gen.overrides, "Explicit decompositions")->check(CLI::ExistingFile);
  g->add_flag("--offline", gen.offline, "Serve subtypes from the cache only");
  g->add_option("--seed", gen.seed);
  g->add_option("--jobs", gen.jobs)->check(CLI::Range(1, 64));

  ServeArgs serve;
  auto* s = app.add_subcommand("serve", "Run the annotation study service");
  s->add_option("--counters", serve.counters)->required()->check(CLI::ExistingFile);
  s->add_option("--store", serve.store, "Store directory")->required();
  s->add_option("--host", serve.host);
  s->add_option("--port", serve.port, "0 picks a free port")->check(CLI::Range(0, 65535));
  s->add_option("--port-file", serve.port_file, "Write the bound port here");
  s->add_option("--seed", serve.seed);
  s->add_option("--setting", serve.settings, "post, stereo or post-stereo");
  s->add_option("--salt-file", serve.salt_file)->check(CLI::ExistingFile);

  RobotArgs robots;
  auto* r = app.add_subcommand("robots", "Drive a running service with scripted annotators");
  r->add_option("--url", robots.url)->required();
  r->add_option("--annotators", robots.annotators)->check(CLI::Range(1, 1000));
  r->add_option("--seed", robots.seed);
  r->add_option("--attention-failure-rate", robots.failure_rate)->check(CLI::Range(0.0, 1.0));
  r->add_option("--setting", robots.settings);

  ReportArgs report;
  auto* rep = app.add_subcommand("report", "Write preference, agreement and demographics reports");
  rep->add_option("--store", report.store)->required()->check(CLI::ExistingDirectory);
  rep->add_option("--out", report.out, "Output directory")->required();
  rep->add_option("--setting", report.settings);
  rep->add_flag("--no-charts", report.no_charts);

  std::vector<std::string> argv_storage{"countering"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*ing) return cmd_ingest(ingest, out);
    if (*g) return cmd_generate(gen, out, err);
    if (*s) return cmd_serve(serve, out, err);
    if (*r) return cmd_robots(robots, out);
    if (*rep) return cmd_report(report, out);
  } catch (const EmptyInput& e) {
    err << "error: " << e.what() << "\n";
    return kExitEmpty;
  } catch (const TransportError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const AuthError& e) {
    err << "error: " << e.what() << "\n";
    return kExitTransport;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}

}  // namespace countering::cli
