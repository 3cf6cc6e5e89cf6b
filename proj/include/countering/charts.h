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

#include <string>
#include <vector>

#include "countering/analytics.h"

namespace countering {

struct ChartSeries {
  std::string name;
  std::vector<double> values;  // one per category; 0..100
};

struct BarChart {
  std::string title;
  std::string y_label = "%";
  std::vector<std::string> categories;
  std::vector<ChartSeries> series;
};

// Deterministic SVG: identical input yields identical bytes.
std::string render_svg(const BarChart& chart);

BarChart first_choice_chart(const PreferenceReport& r);
BarChart second_choice_chart(const PreferenceReport& r);
BarChart incorrect_chart(const PreferenceReport& r);
BarChart agreement_chart(const AgreementReport& r);
BarChart race_chart(const DemographicsReport& r);
BarChart gender_chart(const DemographicsReport& r);

}  // namespace countering
