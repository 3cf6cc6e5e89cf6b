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

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "countering/generic.h"
#include "countering/subtype.h"

namespace countering {

enum class CounterKind { kDirGrp, kDirInd, kAlt, kLots, kTol };

inline constexpr std::array<CounterKind, 5> kAllCounterKinds = {
    CounterKind::kDirGrp, CounterKind::kDirInd, CounterKind::kAlt,
    CounterKind::kLots, CounterKind::kTol};

// "dir-grp", "dir-ind", "alt", "lots", "tol".
std::string_view to_string(CounterKind kind);
std::optional<CounterKind> parse_counter_kind(std::string_view name);
constexpr size_t index_of(CounterKind kind) { return static_cast<size_t>(kind); }

struct Counterstatement {
  CounterKind kind = CounterKind::kTol;
  std::string preamble;
  std::string body;
  std::string full_text;  // preamble + " " + body
  Generic source_generic;
  std::vector<Subtype> subtypes_used;  // the three listed exceptions for Dir kinds

  bool operator==(const Counterstatement&) const = default;
};

struct Omission {
  CounterKind kind;
  std::string reason;

  bool operator==(const Omission&) const = default;
};

// Everything generated for one generic. `statements` follow kAllCounterKinds
// order; kinds that could not be produced are listed in `omitted`.
struct CounterSet {
  Generic generic;
  std::vector<Counterstatement> statements;
  std::vector<Omission> omitted;

  const Counterstatement* find(CounterKind kind) const;
  bool operator==(const CounterSet&) const = default;
};

inline constexpr std::string_view kToleranceBody =
    "All groups of people deserve tolerance.";

std::string make_preamble(std::string_view group);

Counterstatement gen_tol(const Generic& g);
Counterstatement gen_lots(const Generic& g);
// Throws NoAlternativeGroup when neither the surface nor the canonical group
// has an entry.
Counterstatement gen_alt(const Generic& g, const AltGroupMap& alt);
// Lists the first three of `ranked`. `kind` is kDirGrp (subgroups) or kDirInd
// (individuals); throws InsufficientSubtypes with fewer than three.
Counterstatement gen_dir(const Generic& g, std::span<const Subtype> ranked,
                         CounterKind kind);

CounterSet generate_all(const Generic& g, std::span<const Subtype> subgroups,
                        std::span<const Subtype> individuals,
                        const AltGroupMap& alt);

}  // namespace countering
