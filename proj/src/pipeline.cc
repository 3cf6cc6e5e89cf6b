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

#include "countering/pipeline.h"

#include <atomic>
#include <fstream>
#include <semaphore>
#include <thread>

#include <fmt/format.h>

#include "countering/errors.h"
#include "countering/serialization.h"
#include "countering/text.h"

namespace countering {

namespace {

using nlohmann::json;

// Bounds the number of concurrent requests reaching the wrapped client.
class ThrottledClient : public CompletionClient {
 public:
  ThrottledClient(CompletionClient& inner, int limit)
      : inner_(inner), slots_(std::max(1, limit)) {}

  std::vector<std::string> complete(const std::string& prompt,
                                    const CompletionParams& params) override {
    slots_.acquire();
    struct Release {
      std::counting_semaphore<>& s;
      ~Release() { s.release(); }
    } release{slots_};
    return inner_.complete(prompt, params);
  }

 private:
  CompletionClient& inner_;
  std::counting_semaphore<> slots_;
};

struct PairOutcome {
  CounterEntry entry;
  std::vector<std::string> messages;
  bool transport_failure = false;
};

PairOutcome generate_one(const StereotypePair& pair, const GroupLexicon& lexicon,
                         const AltGroupMap& alt, CompletionClient& client,
                         const TruthScorer& scorer, SubtypeCache& cache,
                         const GenerationOptions& options, const Sleeper& sleep) {
  PairOutcome out;
  out.entry.pair = pair;
  Generic g;
  try {
    g = generic_for(pair, lexicon, options.overrides);
  } catch (const ParseError& e) {
    out.entry.error = e.what();
    out.messages.push_back(fmt::format("unparsed stereotype '{}': {}",
                                       pair.stereotype_text, e.what()));
    return out;
  }

  auto fetch = [&](SubtypeKind kind, std::string& failure) -> std::vector<Subtype> {
    SubtypeRequest req{g.group, kind, options.seed, options.params, options.retry};
    try {
      return subtypes_for(req, client, scorer, g, cache, sleep);
    } catch (const AuthError&) {
      throw;
    } catch (const CacheMiss& e) {
      failure = e.what();
    } catch (const TransportError& e) {
      failure = e.what();
      out.transport_failure = true;
    } catch (const ScorerFailure& e) {
      failure = e.what();
    }
    out.messages.push_back(failure);
    return {};
  };
  std::string grp_failure;
  std::string ind_failure;
  auto subgroups = fetch(SubtypeKind::kSubgroup, grp_failure);
  auto individuals = fetch(SubtypeKind::kIndividual, ind_failure);

  CounterSet set = generate_all(g, subgroups, individuals, alt);
  // Report the upstream cause instead of the bare count shortfall.
  for (Omission& o : set.omitted) {
    if (o.kind == CounterKind::kDirGrp && !grp_failure.empty()) o.reason = grp_failure;
    if (o.kind == CounterKind::kDirInd && !ind_failure.empty()) o.reason = ind_failure;
  }
  out.entry.counters = std::move(set);
  return out;
}

}  // namespace

Generic generic_for(const StereotypePair& pair, const GroupLexicon& lexicon,
                    const std::map<std::string, GenericTriple>& overrides) {
  std::optional<GenericTriple> triple = pair.triple;
  if (!triple) {
    auto it = overrides.find(text::trim(pair.stereotype_text));
    if (it != overrides.end()) triple = it->second;
  }
  if (triple) {
    Generic g = Generic::from_triple(triple->group, triple->relation, triple->quality,
                                     lexicon);
    g.surface_text = text::trim(pair.stereotype_text);
    return g;
  }
  return parse_generic(pair.stereotype_text, lexicon);
}

std::map<std::string, GenericTriple> load_overrides(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  std::map<std::string, GenericTriple> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty() || text::trim(line)[0] == '#') continue;
    std::vector<std::string> cols;
    size_t start = 0;
    for (;;) {
      auto tab = line.find('\t', start);
      cols.push_back(text::trim(line.substr(start, tab - start)));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (cols.size() < 3 || cols.size() > 4) {
      throw InputError(fmt::format("{}:{}: expected stereotype, group, relation[, quality]",
                                   path.string(), lineno));
    }
    cols.resize(4);
    out[cols[0]] = GenericTriple{cols[1], cols[2], cols[3]};
  }
  return out;
}

GenerationResult generate_countersets(const std::vector<StereotypePair>& pairs,
                                      const GroupLexicon& lexicon,
                                      const AltGroupMap& alt,
                                      CompletionClient& client,
                                      const TruthScorer& scorer,
                                      SubtypeCache& cache,
                                      const GenerationOptions& options,
                                      const Sleeper& sleep) {
  ThrottledClient throttled(client, options.max_in_flight);
  std::vector<std::optional<PairOutcome>> outcomes(pairs.size());
  std::atomic<size_t> next{0};
  std::atomic<bool> abort{false};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  auto worker = [&] {
    for (;;) {
      if (abort.load()) return;
      const size_t i = next.fetch_add(1);
      if (i >= pairs.size()) return;
      try {
        outcomes[i] = generate_one(pairs[i], lexicon, alt, throttled, scorer, cache,
                                   options, sleep);
      } catch (...) {
        std::lock_guard lock(fatal_mu);
        if (!fatal) fatal = std::current_exception();
        abort = true;
      }
    }
  };
  const int n_workers =
      std::clamp<int>(options.jobs, 1, std::max<int>(1, static_cast<int>(pairs.size())));
  {
    std::vector<std::jthread> threads;
    for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
  }
  if (fatal) std::rethrow_exception(fatal);

  GenerationResult result;
  for (size_t i = 0; i < outcomes.size(); ++i) {
    PairOutcome& o = *outcomes[i];
    for (auto& m : o.messages) result.diagnostics.push_back({i, std::move(m)});
    if (o.entry.counters) ++result.succeeded;
    if (o.transport_failure) ++result.transport_failures;
    result.entries.push_back(std::move(o.entry));
  }
  return result;
}

void write_counters(std::ostream& out, const std::vector<CounterEntry>& entries) {
  for (const auto& e : entries) {
    json j{{"pair", to_json(e.pair)}};
    if (!e.error.empty()) j["error"] = e.error;
    if (e.counters) {
      j["generic"] = to_json(e.counters->generic);
      json statements = json::array();
      for (CounterKind kind : kAllCounterKinds) {
        if (const Counterstatement* cs = e.counters->find(kind)) {
          statements.push_back(to_json(*cs));
        }
        for (const Omission& o : e.counters->omitted) {
          if (o.kind == kind) {
            statements.push_back(
                json{{"kind", std::string(to_string(kind))}, {"omitted_reason", o.reason}});
          }
        }
      }
      j["statements"] = std::move(statements);
    }
    out << j.dump() << "\n";
  }
}

std::vector<CounterEntry> read_counters(std::istream& in) {
  std::vector<CounterEntry> entries;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      json j = json::parse(line);
      CounterEntry e;
      e.pair = pair_from_json(j.at("pair"));
      e.error = j.value("error", std::string());
      if (j.contains("generic")) {
        CounterSet set;
        set.generic = generic_from_json(j.at("generic"));
        for (const auto& s : j.at("statements")) {
          if (s.contains("omitted_reason")) {
            auto kind = parse_counter_kind(s.at("kind").get<std::string>());
            if (!kind) throw InputError("unknown kind " + s.at("kind").dump());
            set.omitted.push_back({*kind, s.at("omitted_reason").get<std::string>()});
          } else {
            set.statements.push_back(counterstatement_from_json(s, set.generic));
          }
        }
        e.counters = std::move(set);
      }
      entries.push_back(std::move(e));
    } catch (const nlohmann::json::exception& ex) {
      throw InputError(fmt::format("counters line {}: {}", lineno, ex.what()));
    }
  }
  return entries;
}

std::vector<CounterEntry> load_counters(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return read_counters(in);
}

}  // namespace countering
