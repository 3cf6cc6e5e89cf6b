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

#include "countering/generic.h"

#include <fstream>
#include <utility>

#include <fmt/format.h>

#include "countering/errors.h"
#include "countering/text.h"

namespace countering {

namespace {

using text::to_lower;

std::string fold(std::string_view s) { return to_lower(text::squeeze(s)); }

struct LexiconEntry {
  const char* raw;
  const char* normalized;
};

// Raw surface forms observed for the corpus groups, followed by the
// comparison groups the templates need to recognise.
constexpr LexiconEntry kDefaultLexicon[] = {
    {"black folks", "Black folks"},
    {"black people", "Black folks"},
    {"blacks", "Black folks"},
    {"black americans", "Black folks"},
    {"african americans", "Black folks"},
    {"african-americans", "Black folks"},
    {"women", "Women"},
    {"woman", "Women"},
    {"females", "Women"},
    {"muslim folks", "Muslim folks"},
    {"muslims", "Muslim folks"},
    {"muslim people", "Muslim folks"},
    {"jewish folks", "Jewish folks"},
    {"jews", "Jewish folks"},
    {"jewish people", "Jewish folks"},
    {"asian folks", "Asian folks"},
    {"asians", "Asian folks"},
    {"asian people", "Asian folks"},
    {"gay men", "Gay men"},
    {"gays", "Gay men"},
    {"gay people", "Gay men"},
    {"latino/latina folks", "Latino/Latina folks"},
    {"latinos", "Latino/Latina folks"},
    {"latino folks", "Latino/Latina folks"},
    {"latina folks", "Latino/Latina folks"},
    {"hispanics", "Latino/Latina folks"},
    {"hispanic people", "Latino/Latina folks"},
    {"liberals", "Liberals"},
    {"feminists", "Feminists"},
    {"african folks", "African folks"},
    {"africans", "African folks"},
    {"african people", "African folks"},
    {"mentally disabled folks", "Mentally disabled folks"},
    {"mentally disabled people", "Mentally disabled folks"},
    {"indian folks", "Indian folks"},
    {"indians", "Indian folks"},
    {"indian people", "Indian folks"},
    {"lesbian women", "Lesbian women"},
    {"lesbians", "Lesbian women"},
    {"immigrants", "Immigrants"},
    {"ethiopian folks", "Ethiopian folks"},
    {"ethiopians", "Ethiopian folks"},
    {"ethiopian people", "Ethiopian folks"},
    {"american folks", "American folks"},
    {"americans", "American folks"},
    {"american people", "American folks"},
    {"mexican folks", "Mexican folks"},
    {"mexicans", "Mexican folks"},
    {"mexican people", "Mexican folks"},
    {"physically disabled folks", "Physically disabled folks"},
    {"physically disabled people", "Physically disabled folks"},
    {"folks with mental illness/disorder", "Folks with mental illness/disorder"},
    {"mentally ill people", "Folks with mental illness/disorder"},
    {"people with mental illness", "Folks with mental illness/disorder"},
    {"japanese folks", "Japanese folks"},
    {"japanese people", "Japanese folks"},
    {"polish folks", "Polish folks"},
    {"polish people", "Polish folks"},
    {"arabic folks", "Arabic folks"},
    {"arabs", "Arabic folks"},
    {"arab people", "Arabic folks"},
    {"italian folks", "Italian folks"},
    {"italians", "Italian folks"},
    {"italian people", "Italian folks"},
    {"christian folks", "Christian folks"},
    {"christians", "Christian folks"},
    {"native american/first nation folks", "Native American/First Nation folks"},
    {"native americans", "Native American/First Nation folks"},
    {"first nation folks", "Native American/First Nation folks"},
    // Comparison groups.
    {"men", "Men"},
    {"white folks", "White folks"},
    {"white people", "White folks"},
    {"whites", "White folks"},
    {"conservatives", "Conservatives"},
    {"scots", "Scots"},
};

constexpr std::pair<const char*, const char*> kDefaultAltGroups[] = {
    {"Women", "men"},
    {"Black folks", "white folks"},
    {"Liberals", "conservatives"},
};

template <typename AddFn>
void parse_tab_lines(std::istream& in, std::string_view source, AddFn add) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = text::trim(line);
    if (stripped.empty() || stripped[0] == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InputError(fmt::format("{}:{}: expected two tab-separated fields",
                                   source, lineno));
    }
    std::string key = text::trim(line.substr(0, tab));
    std::string value = text::trim(line.substr(tab + 1));
    if (key.empty() || value.empty()) {
      throw InputError(fmt::format("{}:{}: empty field", source, lineno));
    }
    add(key, value);
  }
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return in;
}

enum class RelationClass {
  kCopula,          // is, are
  kShould,
  kNegatedDo,       // don't, doesn't, do not, does not
  kNegatedCopula,   // isn't, aren't, is not, are not
  kOther,
};

RelationClass classify(std::string_view relation) {
  const std::string r = fold(relation);
  if (r == "is" || r == "are") return RelationClass::kCopula;
  if (r == "should") return RelationClass::kShould;
  if (r == "don't" || r == "do not" || r == "dont" || r == "doesn't" ||
      r == "does not" || r == "doesnt") {
    return RelationClass::kNegatedDo;
  }
  if (r == "isn't" || r == "aren't" || r == "is not" || r == "are not") {
    return RelationClass::kNegatedCopula;
  }
  return RelationClass::kOther;
}

// "is" for is/isn't/is not, otherwise "are".
std::string_view copula_base(std::string_view relation) {
  return fold(relation).starts_with("is") ? "is" : "are";
}

}  // namespace

GroupLexicon GroupLexicon::defaults() {
  GroupLexicon lex;
  for (const auto& e : kDefaultLexicon) lex.add(e.raw, e.normalized);
  return lex;
}

GroupLexicon GroupLexicon::parse(std::istream& in, std::string_view source) {
  GroupLexicon lex;
  parse_tab_lines(in, source, [&](const std::string& k, const std::string& v) {
    lex.add(k, v);
  });
  return lex;
}

GroupLexicon GroupLexicon::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse(in, path.string());
}

void GroupLexicon::add(std::string_view raw, std::string_view normalized) {
  const std::string value = text::squeeze(normalized);
  if (value.empty() || fold(raw).empty()) {
    throw InputError("group lexicon entries must be non-empty");
  }
  for (const std::string& key : {fold(raw), fold(value)}) {
    auto [it, inserted] = entries_.emplace(key, value);
    if (!inserted && it->second != value) {
      throw InputError(fmt::format(
          "group lexicon conflict: '{}' maps to both '{}' and '{}'", key,
          it->second, value));
    }
    max_words_ = std::max(max_words_, text::split_words(key).size());
  }
}

std::optional<std::string> GroupLexicon::lookup(std::string_view raw) const {
  auto it = entries_.find(fold(raw));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

size_t GroupLexicon::longest_prefix(const std::vector<std::string>& words) const {
  for (size_t n = std::min(max_words_, words.size()); n > 0; --n) {
    std::vector<std::string> head(words.begin(), words.begin() + n);
    if (entries_.count(to_lower(text::join(head, " ")))) return n;
  }
  return 0;
}

AltGroupMap AltGroupMap::defaults() {
  AltGroupMap alt;
  for (const auto& [group, other] : kDefaultAltGroups) alt.add(group, other);
  return alt;
}

AltGroupMap AltGroupMap::parse(std::istream& in, std::string_view source) {
  AltGroupMap alt;
  parse_tab_lines(in, source, [&](const std::string& k, const std::string& v) {
    alt.add(k, v);
  });
  return alt;
}

AltGroupMap AltGroupMap::load(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  return parse(in, path.string());
}

void AltGroupMap::add(std::string_view group, std::string_view alt) {
  const std::string key = fold(group);
  const std::string value = text::squeeze(alt);
  if (key.empty() || value.empty()) {
    throw InputError("alternative group entries must be non-empty");
  }
  if (key == fold(value)) {
    throw InputError(
        fmt::format("alternative group for '{}' must differ from it", group));
  }
  entries_[key] = value;
}

std::optional<std::string> AltGroupMap::lookup(std::string_view group) const {
  auto it = entries_.find(fold(group));
  if (it == entries_.end()) return std::nullopt;
  return it->second;
}

Generic Generic::from_triple(std::string_view group, std::string_view relation,
                             std::string_view quality,
                             const GroupLexicon& lexicon) {
  Generic g;
  g.group = to_lower(text::squeeze(group));
  g.relation = to_lower(text::squeeze(relation));
  g.quality = text::squeeze(text::strip_trailing_punct(quality));
  if (g.group.empty()) throw NoGroupMatch("generic has an empty group");
  if (g.relation.empty()) throw NoRelation("generic has an empty relation");
  g.canonical_group = normalize_group(g.group, lexicon);
  g.surface_text = g.rejoin();
  return g;
}

std::string Generic::rejoin() const {
  return text::join_words({group, relation, quality});
}

Generic parse_generic(std::string_view text_in, const GroupLexicon& lexicon) {
  const std::string sentence = text::strip_trailing_punct(text_in);
  const std::vector<std::string> words = text::split_words(sentence);
  if (words.empty()) throw NoGroupMatch("empty generic");

  const size_t n_group = lexicon.longest_prefix(words);
  if (n_group == 0) {
    throw NoGroupMatch(
        fmt::format("no known group at the start of '{}'", text::trim(text_in)));
  }
  if (n_group == words.size()) {
    throw NoRelation(
        fmt::format("nothing follows the group in '{}'", text::trim(text_in)));
  }

  size_t i = n_group;
  std::string relation = to_lower(words[i++]);
  if (i < words.size() && to_lower(words[i]) == "not" &&
      (relation == "do" || relation == "does" || relation == "is" ||
       relation == "are")) {
    relation += " not";
    ++i;
  }

  Generic g;
  g.surface_text = text::trim(text_in);
  g.group = to_lower(text::join({words.begin(), words.begin() + n_group}, " "));
  g.relation = std::move(relation);
  g.quality = text::join({words.begin() + i, words.end()}, " ");
  g.canonical_group = normalize_group(g.group, lexicon);
  return g;
}

std::string hedge_clause(std::string_view relation, std::string_view quality) {
  const std::string q = text::squeeze(quality);
  switch (classify(relation)) {
    case RelationClass::kCopula:
      return text::join_words({"can also be", q});
    case RelationClass::kShould:
      return text::join_words({"should also", q});
    case RelationClass::kNegatedDo:
      return text::join_words({"may also not", q});
    case RelationClass::kNegatedCopula:
      return text::join_words({"may also not be", q});
    case RelationClass::kOther:
      break;
  }
  return text::join_words({"may also", fold(relation), q});
}

std::string negate_predicate(std::string_view relation, std::string_view quality) {
  const std::string q = text::squeeze(quality);
  switch (classify(relation)) {
    case RelationClass::kCopula:
      return text::join_words({copula_base(relation), "not", q});
    case RelationClass::kShould:
      return text::join_words({"should not", q});
    case RelationClass::kNegatedDo:
      return q.empty() ? std::string("do") : q;
    case RelationClass::kNegatedCopula:
      return text::join_words({copula_base(relation), q});
    case RelationClass::kOther:
      break;
  }
  return text::join_words({"do not", fold(relation), q});
}

std::string normalize_group(std::string_view raw, const GroupLexicon& lexicon) {
  if (auto hit = lexicon.lookup(raw)) return *hit;
  return fold(raw);
}

}  // namespace countering
