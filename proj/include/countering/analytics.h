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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "countering/counter.h"
#include "countering/study.h"
#include "json.hpp"

// Descriptive reports over valid annotation records. Percentages are kept at
// full double precision; rounding to one decimal happens only when a report
// is serialized.
namespace countering {

using TaskLookup = std::map<std::string, const StudyTask*>;
TaskLookup make_task_lookup(const std::vector<StudyTask>& tasks);

template <typename T>
using PerKind = std::array<T, kAllCounterKinds.size()>;

struct SettingPreference {
  StudySetting setting;
  int n_valid = 0;
  PerKind<int> first_counts{};
  PerKind<int> second_counts{};
  PerKind<int> incorrect_counts{};
  PerKind<int> ungrammatical_counts{};
  PerKind<double> first_choice_pct{};
  PerKind<double> second_choice_pct{};
  // Denominated by records in the setting; a record marks a kind at most once.
  PerKind<double> incorrect_pct{};
  PerKind<double> ungrammatical_pct{};
};

struct PreferenceReport {
  std::vector<SettingPreference> settings;
  const SettingPreference* find(StudySetting s) const;
};

struct AgreementBucket {
  int n = 0;
  PerKind<int> first_counts{};
  PerKind<std::optional<double>> first_choice_pct{};  // null when n == 0
};

struct SettingAgreement {
  StudySetting setting;
  int n_valid = 0;
  int n_agreeing = 0;
  double pct_agreeing = 0.0;
};

struct AgreementReport {
  AgreementBucket agree;
  AgreementBucket disagree;
  std::vector<SettingAgreement> settings;
};

struct Distribution {
  int n = 0;
  std::map<std::string, int> counts;
  std::map<std::string, double> pct;
};

struct SettingDemographics {
  StudySetting setting;
  int n_annotators = 0;
  Distribution race;
  Distribution gender;
};

struct DemographicsReport {
  std::vector<SettingDemographics> settings;
};

// `settings` restricts the report; when absent every setting with at least
// one valid record is included. Throws EmptyInput when a requested setting,
// or the whole input, has no valid records. Records failing the attention
// check are ignored.
PreferenceReport preference_report(const std::vector<AnnotationRecord>& records,
                                   const TaskLookup& tasks,
                                   const std::optional<std::vector<StudySetting>>& settings = {});

AgreementReport agreement_report(const std::vector<AnnotationRecord>& records,
                                 const TaskLookup& tasks,
                                 const std::optional<std::vector<StudySetting>>& settings = {});

// Each annotator counts once per setting; missing or declined answers fall
// under "undisclosed".
DemographicsReport demographics_report(const std::vector<AnnotationRecord>& records,
                                       const std::vector<AnnotatorProfile>& profiles,
                                       const TaskLookup& tasks,
                                       const std::optional<std::vector<StudySetting>>& settings = {});

double round1(double x);

nlohmann::json to_json(const PreferenceReport& r);
nlohmann::json to_json(const AgreementReport& r);
nlohmann::json to_json(const DemographicsReport& r);

std::string format_text(const PreferenceReport& r);
std::string format_text(const AgreementReport& r);
std::string format_text(const DemographicsReport& r);

}  // namespace countering
