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

#include <optional>
#include <string>
#include <string_view>

namespace countering {

enum class SubtypeKind { kSubgroup, kIndividual };

std::string_view to_string(SubtypeKind kind);
std::optional<SubtypeKind> parse_subtype_kind(std::string_view name);

// A candidate exception to a generic: a subgroup ("female movie stars") or
// an individual group member. `score` is the scorer's probability that the
// resulting exception is true and relevant.
struct Subtype {
  std::string surface;
  SubtypeKind kind = SubtypeKind::kSubgroup;
  double score = 0.0;

  bool operator==(const Subtype&) const = default;
};

}  // namespace countering
