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

#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "countering/generic.h"

namespace countering {

struct RawAnnotationRow {
  std::string post;
  std::string target_group;
  std::string target_stereotype;
  std::string annotator_id;
};

// Explicit decomposition that replaces parsing for one stereotype.
struct GenericTriple {
  std::string group;
  std::string relation;
  std::string quality;

  bool operator==(const GenericTriple&) const = default;
};

// A post and a stereotype that at least two annotators wrote verbatim.
struct StereotypePair {
  std::string post_text;
  std::string stereotype_text;
  std::string group;  // normalized
  int support = 0;    // distinct annotators who wrote stereotype_text
  std::optional<GenericTriple> triple;

  bool operator==(const StereotypePair&) const = default;
};

// Column names of the four fields. Each field accepts any listed alias; the
// defaults cover both the plain names and the SBIC release names.
struct ColumnMapping {
  std::vector<std::string> post = {"post"};
  std::vector<std::string> target_group = {"target_group", "targetMinority"};
  std::vector<std::string> target_stereotype = {"target_stereotype",
                                                "targetStereotype"};
  std::vector<std::string> annotator_id = {"annotator_id", "WorkerId"};

  // `field<TAB>column` lines; a listed field replaces its default aliases.
  static ColumnMapping load(const std::filesystem::path& path);
};

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  char delimiter = ',';
};

// Quoted-field aware reader for comma- or tab-separated text. The delimiter
// is whichever of the two occurs more often in the header line.
Table read_delimited(std::istream& in);

struct IngestReport {
  size_t rows_read = 0;
  size_t malformed_rows = 0;      // wrong arity, empty post or annotator
  size_t empty_stereotype_rows = 0;
  size_t posts = 0;
  size_t posts_with_enough_annotations = 0;
};

// Maps table columns onto rows. Throws InputError when a field's column is
// missing from the header.
std::vector<RawAnnotationRow> rows_from_table(const Table& table,
                                              const ColumnMapping& mapping,
                                              IngestReport& report);

std::vector<RawAnnotationRow> read_annotation_rows(const std::filesystem::path& path,
                                                   const ColumnMapping& mapping,
                                                   IngestReport& report);

struct ExtractionResult {
  std::vector<StereotypePair> pairs;
  IngestReport report;
};

// Posts with at least three stereotype annotations contribute one pair per
// stereotype string (trimmed, case-sensitive) written by two or more distinct
// annotators. Output is sorted by (group, post_text, stereotype_text).
ExtractionResult extract_pairs(const std::vector<RawAnnotationRow>& rows,
                               const GroupLexicon& lexicon);

std::map<std::string, int> group_counts(const std::vector<StereotypePair>& pairs);

// Per-group table in descending count order plus a "N pairs, M groups" line.
std::string format_group_table(const std::map<std::string, int>& counts);

void write_pairs(std::ostream& out, const std::vector<StereotypePair>& pairs);
std::vector<StereotypePair> read_pairs(std::istream& in);
std::vector<StereotypePair> load_pairs(const std::filesystem::path& path);

}  // namespace countering
