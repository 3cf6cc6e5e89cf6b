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

#include "countering/charts.h"

#include <algorithm>
#include <set>

#include <fmt/format.h>

namespace countering {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 360;
constexpr int kLeft = 56;
constexpr int kRight = 150;
constexpr int kTop = 40;
constexpr int kBottom = 50;

constexpr const char* kPalette[] = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                    "#76b7b2", "#b07aa1", "#edc948", "#9c755f"};

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::string> kind_names() {
  std::vector<std::string> out;
  for (CounterKind k : kAllCounterKinds) out.emplace_back(to_string(k));
  return out;
}

BarChart per_setting_chart(const PreferenceReport& r, std::string title,
                           PerKind<double> SettingPreference::*field) {
  BarChart c;
  c.title = std::move(title);
  c.categories = kind_names();
  for (const auto& sp : r.settings) {
    ChartSeries s{std::string(to_string(sp.setting)), {}};
    for (double v : sp.*field) s.values.push_back(v);
    c.series.push_back(std::move(s));
  }
  return c;
}

BarChart distribution_chart(const DemographicsReport& r, std::string title,
                            Distribution SettingDemographics::*field) {
  BarChart c;
  c.title = std::move(title);
  std::set<std::string> cats;
  for (const auto& sd : r.settings) {
    for (const auto& [k, v] : (sd.*field).pct) cats.insert(k);
  }
  c.categories.assign(cats.begin(), cats.end());
  for (const auto& sd : r.settings) {
    ChartSeries s{std::string(to_string(sd.setting)), {}};
    for (const auto& cat : c.categories) {
      auto it = (sd.*field).pct.find(cat);
      s.values.push_back(it == (sd.*field).pct.end() ? 0.0 : it->second);
    }
    c.series.push_back(std::move(s));
  }
  return c;
}

}  // namespace

std::string render_svg(const BarChart& chart) {
  const int plot_w = kWidth - kLeft - kRight;
  const int plot_h = kHeight - kTop - kBottom;
  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
      "viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += fmt::format("<rect width=\"{}\" height=\"{}\" fill=\"white\"/>\n", kWidth, kHeight);
  out += fmt::format("<text x=\"{}\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">{}</text>\n",
                     kLeft + plot_w / 2, escape(chart.title));

  for (int tick = 0; tick <= 100; tick += 20) {
    double y = kTop + plot_h * (1.0 - tick / 100.0);
    out += fmt::format(
        "<line x1=\"{}\" y1=\"{:.1f}\" x2=\"{}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>\n"
        "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n",
        kLeft, y, kLeft + plot_w, y, kLeft - 6, y + 4, tick);
  }
  out += fmt::format(
      "<text transform=\"translate(16 {}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
      kTop + plot_h / 2, escape(chart.y_label));

  const size_t n_cat = std::max<size_t>(chart.categories.size(), 1);
  const size_t n_series = std::max<size_t>(chart.series.size(), 1);
  const double group_w = static_cast<double>(plot_w) / n_cat;
  const double bar_w = group_w * 0.8 / n_series;
  for (size_t c = 0; c < chart.categories.size(); ++c) {
    double gx = kLeft + group_w * c + group_w * 0.1;
    for (size_t s = 0; s < chart.series.size(); ++s) {
      const auto& values = chart.series[s].values;
      double v = c < values.size() ? std::clamp(values[c], 0.0, 100.0) : 0.0;
      double h = plot_h * v / 100.0;
      out += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"{}\">"
          "<title>{} {}: {:.1f}</title></rect>\n",
          gx + bar_w * s, kTop + plot_h - h, bar_w, h, kPalette[s % std::size(kPalette)],
          escape(chart.series[s].name), escape(chart.categories[c]), v);
    }
    out += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + group_w * c + group_w / 2, kTop + plot_h + 18,
                       escape(chart.categories[c]));
  }
  out += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", kLeft,
                     kTop + plot_h, kLeft + plot_w, kTop + plot_h);

  for (size_t s = 0; s < chart.series.size(); ++s) {
    int y = kTop + 10 + static_cast<int>(s) * 20;
    out += fmt::format(
        "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>"
        "<text x=\"{}\" y=\"{}\">{}</text>\n",
        kWidth - kRight + 16, y, kPalette[s % std::size(kPalette)], kWidth - kRight + 34, y + 10,
        escape(chart.series[s].name));
  }
  out += "</svg>\n";
  return out;
}

BarChart first_choice_chart(const PreferenceReport& r) {
  return per_setting_chart(r, "First choice by counterstatement type",
                           &SettingPreference::first_choice_pct);
}

BarChart second_choice_chart(const PreferenceReport& r) {
  return per_setting_chart(r, "Second choice by counterstatement type",
                           &SettingPreference::second_choice_pct);
}

BarChart incorrect_chart(const PreferenceReport& r) {
  return per_setting_chart(r, "Marked incorrect", &SettingPreference::incorrect_pct);
}

BarChart agreement_chart(const AgreementReport& r) {
  BarChart c;
  c.title = "First choice by agreement";
  c.categories = kind_names();
  for (auto [name, b] : {std::pair{"agree", &r.agree}, std::pair{"disagree", &r.disagree}}) {
    ChartSeries s{fmt::format("{} (n={})", name, b->n), {}};
    for (const auto& v : b->first_choice_pct) s.values.push_back(v.value_or(0.0));
    c.series.push_back(std::move(s));
  }
  return c;
}

BarChart race_chart(const DemographicsReport& r) {
  return distribution_chart(r, "Annotator race", &SettingDemographics::race);
}

BarChart gender_chart(const DemographicsReport& r) {
  return distribution_chart(r, "Annotator gender", &SettingDemographics::gender);
}

}  // namespace countering
