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
#include <string>
#include <string_view>
#include <vector>

namespace countering {

// Maps raw group surface forms to normalized group names. Lookups are
// case-insensitive over trimmed, whitespace-squeezed keys. Every normalized
// name is also registered as a key for itself, so normalization is
// idempotent.
class GroupLexicon {
 public:
  GroupLexicon() = default;

  // The 25 corpus groups plus the comparison groups used by the templates.
  static GroupLexicon defaults();
  // Reads `raw<TAB>normalized` lines; '#' starts a comment line.
  static GroupLexicon parse(std::istream& in, std::string_view source = "<stream>");
  static GroupLexicon load(const std::filesystem::path& path);

  // Throws InputError when `raw` is already bound to a different name.
  void add(std::string_view raw, std::string_view normalized);

  std::optional<std::string> lookup(std::string_view raw) const;
  // Number of leading words of `words` forming the longest known group,
  // or 0 when none matches.
  size_t longest_prefix(const std::vector<std::string>& words) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::map<std::string, std::string> entries_;  // folded key -> normalized
  size_t max_words_ = 0;
};

// Target group -> perceived oppressing group.
class AltGroupMap {
 public:
  AltGroupMap() = default;

  static AltGroupMap defaults();
  // Reads `group<TAB>alt_group` lines.
  static AltGroupMap parse(std::istream& in, std::string_view source = "<stream>");
  static AltGroupMap load(const std::filesystem::path& path);

  // Throws InputError if alt equals group (case-insensitively).
  void add(std::string_view group, std::string_view alt);
  std::optional<std::string> lookup(std::string_view group) const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

 private:
  std::map<std::string, std::string> entries_;  // folded key -> alt
};

// A stereotype decomposed into group, relation and quality.
//
// `group` keeps the surface wording (lowercased) because the templates echo
// it back ("The following black people work"); `canonical_group` is the
// lexicon-normalized name used for alternative-group lookup and reporting.
struct Generic {
  std::string surface_text;
  std::string group;
  std::string relation;
  std::string quality;
  std::string canonical_group;

  // Builds from an explicit triple, bypassing sentence parsing.
  static Generic from_triple(std::string_view group, std::string_view relation,
                             std::string_view quality,
                             const GroupLexicon& lexicon);

  // "group relation quality" with single spaces.
  std::string rejoin() const;

  bool operator==(const Generic&) const = default;
};

// Splits a generic sentence. The group is the longest lexicon entry anchored
// at the start; the relation is the next word (two words for "do not",
// "are not" and similar); the quality is the remainder minus final
// punctuation.
Generic parse_generic(std::string_view text, const GroupLexicon& lexicon);

// Hedged form of the relation + quality used by the broadening templates.
std::string hedge_clause(std::string_view relation, std::string_view quality);

// Negated predicate used by the direct-exception template.
std::string negate_predicate(std::string_view relation, std::string_view quality);

std::string normalize_group(std::string_view raw, const GroupLexicon& lexicon);

}  // namespace countering
