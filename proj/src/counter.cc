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

#include "countering/counter.h"

#include <fmt/format.h>

#include "countering/errors.h"
#include "countering/text.h"

namespace countering {

namespace {

constexpr std::array<std::string_view, 5> kKindNames = {"dir-grp", "dir-ind",
                                                        "alt", "lots", "tol"};

Counterstatement assemble(const Generic& g, CounterKind kind, std::string body) {
  Counterstatement cs;
  cs.kind = kind;
  cs.preamble = make_preamble(g.group);
  cs.body = std::move(body);
  cs.full_text = cs.preamble + " " + cs.body;
  cs.source_generic = g;
  return cs;
}

// Capitalizes and terminates a sentence assembled from lowercase pieces.
std::string sentence(std::string_view s) {
  return text::capitalize_first(text::strip_trailing_punct(s)) + ".";
}

}  // namespace

std::string_view to_string(CounterKind kind) { return kKindNames[index_of(kind)]; }

std::optional<CounterKind> parse_counter_kind(std::string_view name) {
  for (CounterKind k : kAllCounterKinds) {
    if (to_string(k) == name) return k;
  }
  return std::nullopt;
}

const Counterstatement* CounterSet::find(CounterKind kind) const {
  for (const auto& cs : statements) {
    if (cs.kind == kind) return &cs;
  }
  return nullptr;
}

std::string make_preamble(std::string_view group) {
  return fmt::format("Actually, this is a generalization about {}.", group);
}

Counterstatement gen_tol(const Generic& g) {
  return assemble(g, CounterKind::kTol, std::string(kToleranceBody));
}

Counterstatement gen_lots(const Generic& g) {
  return assemble(
      g, CounterKind::kLots,
      sentence("Lots of people " + hedge_clause(g.relation, g.quality)));
}

Counterstatement gen_alt(const Generic& g, const AltGroupMap& alt) {
  std::optional<std::string> other = alt.lookup(g.group);
  if (!other) other = alt.lookup(g.canonical_group);
  if (!other) {
    throw NoAlternativeGroup(
        fmt::format("no alternative group configured for '{}'", g.group));
  }
  if (text::iequals(*other, g.group) || text::iequals(*other, g.canonical_group)) {
    throw NoAlternativeGroup(fmt::format(
        "alternative group '{}' is the target group itself", *other));
  }
  return assemble(g, CounterKind::kAlt,
                  sentence(*other + " " + hedge_clause(g.relation, g.quality)));
}

Counterstatement gen_dir(const Generic& g, std::span<const Subtype> ranked,
                         CounterKind kind) {
  SubtypeKind wanted;
  if (kind == CounterKind::kDirGrp) {
    wanted = SubtypeKind::kSubgroup;
  } else if (kind == CounterKind::kDirInd) {
    wanted = SubtypeKind::kIndividual;
  } else {
    throw std::invalid_argument("gen_dir needs dir-grp or dir-ind");
  }
  if (ranked.size() < 3) {
    throw InsufficientSubtypes(fmt::format(
        "{} needs 3 ranked {}s, got {}", to_string(kind), to_string(wanted),
        ranked.size()));
  }
  for (const Subtype& s : ranked.first(3)) {
    if (s.kind != wanted) {
      throw std::invalid_argument(fmt::format(
          "{} given a {} subtype '{}'", to_string(kind), to_string(s.kind), s.surface));
    }
  }
  std::string body = fmt::format(
      "The following {}: {}, {}, and {}",
      text::join_words({g.group, negate_predicate(g.relation, g.quality)}),
      ranked[0].surface, ranked[1].surface, ranked[2].surface);
  Counterstatement cs = assemble(g, kind, sentence(body));
  cs.subtypes_used.assign(ranked.begin(), ranked.begin() + 3);
  return cs;
}

CounterSet generate_all(const Generic& g, std::span<const Subtype> subgroups,
                        std::span<const Subtype> individuals,
                        const AltGroupMap& alt) {
  CounterSet set;
  set.generic = g;
  auto attempt = [&](CounterKind kind, auto&& make) {
    try {
      set.statements.push_back(make());
    } catch (const InsufficientSubtypes& e) {
      set.omitted.push_back({kind, e.what()});
    } catch (const NoAlternativeGroup& e) {
      set.omitted.push_back({kind, e.what()});
    }
  };
  attempt(CounterKind::kDirGrp,
          [&] { return gen_dir(g, subgroups, CounterKind::kDirGrp); });
  attempt(CounterKind::kDirInd,
          [&] { return gen_dir(g, individuals, CounterKind::kDirInd); });
  attempt(CounterKind::kAlt, [&] { return gen_alt(g, alt); });
  set.statements.push_back(gen_lots(g));
  set.statements.push_back(gen_tol(g));
  return set;
}

}  // namespace countering
