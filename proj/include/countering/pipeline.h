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

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "countering/corpus.h"
#include "countering/counter.h"
#include "countering/subtypes.h"

namespace countering {

// One line of the counterstatements file.
struct CounterEntry {
  StereotypePair pair;
  std::optional<CounterSet> counters;  // absent when the stereotype did not parse
  std::string error;

  bool operator==(const CounterEntry&) const = default;
};

struct GenerationOptions {
  std::uint64_t seed = 0;
  CompletionParams params;
  RetryPolicy retry;
  int jobs = 4;
  // Concurrent client requests across all workers.
  int max_in_flight = 4;
  // stereotype_text -> explicit decomposition
  std::map<std::string, GenericTriple> overrides;
};

struct Diagnostic {
  size_t pair_index;
  std::string message;
};

struct GenerationResult {
  std::vector<CounterEntry> entries;
  std::vector<Diagnostic> diagnostics;  // ordered by pair index
  size_t succeeded = 0;
  size_t transport_failures = 0;
};

// Structured triples on the pair or in `overrides` win over parsing.
Generic generic_for(const StereotypePair& pair, const GroupLexicon& lexicon,
                    const std::map<std::string, GenericTriple>& overrides = {});

// `stereotype<TAB>group<TAB>relation<TAB>quality` lines.
std::map<std::string, GenericTriple> load_overrides(const std::filesystem::path& path);

// Builds one counter set per pair. Parsing failures and subtype failures are
// recorded per pair and never abort the batch; AuthError does.
GenerationResult generate_countersets(const std::vector<StereotypePair>& pairs,
                                      const GroupLexicon& lexicon,
                                      const AltGroupMap& alt,
                                      CompletionClient& client,
                                      const TruthScorer& scorer,
                                      SubtypeCache& cache,
                                      const GenerationOptions& options,
                                      const Sleeper& sleep = real_sleeper());

void write_counters(std::ostream& out, const std::vector<CounterEntry>& entries);
std::vector<CounterEntry> read_counters(std::istream& in);
std::vector<CounterEntry> load_counters(const std::filesystem::path& path);

}  // namespace countering
