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

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "countering/corpus.h"
#include "countering/study.h"

// Deliberately naive reference implementations. They share data types with
// the library but none of its logic.
namespace countering::oracle {

struct PairCount {
  std::string post;
  std::string stereotype;
  std::string group;
  int support = 0;
  bool operator<(const PairCount& o) const {
    return std::tie(post, stereotype) < std::tie(o.post, o.stereotype);
  }
  bool operator==(const PairCount&) const = default;
};

// Quadratic rescans of the raw rows.
std::vector<PairCount> brute_force_pairs(const std::vector<RawAnnotationRow>& rows,
                                         const std::function<std::string(const std::string&)>& normalize);

// Distinct annotators whose trimmed stereotype for `post` equals `stereotype`.
int verbatim_support(const std::vector<RawAnnotationRow>& rows, const std::string& post,
                     const std::string& stereotype);

// Stable descending insertion sort on score.
std::vector<std::string> sort_by_score(std::vector<std::pair<std::string, double>> items);

// Report cells keyed "setting|metric|column" for a flat comparison.
using Cells = std::map<std::string, double>;

Cells preference_cells(const std::vector<AnnotationRecord>& records,
                       const std::vector<StudyTask>& tasks);
Cells agreement_cells(const std::vector<AnnotationRecord>& records,
                      const std::vector<StudyTask>& tasks);
Cells demographics_cells(const std::vector<AnnotationRecord>& records,
                         const std::vector<AnnotatorProfile>& profiles,
                         const std::vector<StudyTask>& tasks);

}  // namespace countering::oracle
