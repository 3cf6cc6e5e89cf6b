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

#include "countering/analytics.h"

#include <cmath>
#include <set>

#include <fmt/format.h>

#include "countering/errors.h"

namespace countering {

namespace {

using nlohmann::json;

double pct(int count, int n) { return n == 0 ? 0.0 : 100.0 * count / n; }

const StudyTask& task_of(const TaskLookup& tasks, const AnnotationRecord& r) {
  auto it = tasks.find(r.task_id);
  if (it == tasks.end()) {
    throw InputError(fmt::format("record references unknown task '{}'", r.task_id));
  }
  return *it->second;
}

std::optional<CounterKind> kind_of(const StudyTask& t, const std::string& option_id) {
  const TaskOption* o = t.option(option_id);
  if (!o) return std::nullopt;
  return o->kind;
}

struct Selection {
  std::vector<StudySetting> settings;
  // Valid records grouped by setting index.
  std::array<std::vector<const AnnotationRecord*>, 3> by_setting;
};

Selection select(const std::vector<AnnotationRecord>& records, const TaskLookup& tasks,
                 const std::optional<std::vector<StudySetting>>& requested) {
  Selection sel;
  for (const auto& r : records) {
    if (!r.attention_passed) continue;
    sel.by_setting[index_of(task_of(tasks, r).setting)].push_back(&r);
  }
  if (requested) {
    for (StudySetting s : *requested) {
      if (sel.by_setting[index_of(s)].empty()) {
        throw EmptyInput(fmt::format("no valid records for setting {}", to_string(s)));
      }
    }
    sel.settings = *requested;
  } else {
    for (StudySetting s : kAllSettings) {
      if (!sel.by_setting[index_of(s)].empty()) sel.settings.push_back(s);
    }
    if (sel.settings.empty()) throw EmptyInput("no valid annotation records");
  }
  return sel;
}

json per_kind_json(const PerKind<double>& values) {
  json j = json::object();
  for (CounterKind k : kAllCounterKinds) j[std::string(to_string(k))] = round1(values[index_of(k)]);
  return j;
}

json per_kind_json(const PerKind<int>& values) {
  json j = json::object();
  for (CounterKind k : kAllCounterKinds) j[std::string(to_string(k))] = values[index_of(k)];
  return j;
}

json per_kind_json(const PerKind<std::optional<double>>& values) {
  json j = json::object();
  for (CounterKind k : kAllCounterKinds) {
    const auto& v = values[index_of(k)];
    j[std::string(to_string(k))] = v ? json(round1(*v)) : json(nullptr);
  }
  return j;
}

json distribution_json(const Distribution& d) {
  json pcts = json::object();
  for (const auto& [k, v] : d.pct) pcts[k] = round1(v);
  return json{{"n", d.n}, {"counts", d.counts}, {"pct", pcts}};
}

std::string kind_header() {
  std::string out = fmt::format("{:<14}", "");
  for (CounterKind k : kAllCounterKinds) out += fmt::format("{:>9}", to_string(k));
  return out + "\n";
}

std::string kind_row(std::string_view label, const PerKind<double>& values) {
  std::string out = fmt::format("{:<14}", label);
  for (double v : values) out += fmt::format("{:>9.1f}", v);
  return out + "\n";
}

void fill_distribution(Distribution& d) {
  for (const auto& [k, c] : d.counts) d.pct[k] = pct(c, d.n);
}

std::string category(const std::string& value) {
  return value.empty() ? std::string(kUndisclosed) : value;
}

}  // namespace

TaskLookup make_task_lookup(const std::vector<StudyTask>& tasks) {
  TaskLookup lookup;
  for (const auto& t : tasks) lookup.emplace(t.task_id, &t);
  return lookup;
}

double round1(double x) { return std::round(x * 10.0) / 10.0; }

const SettingPreference* PreferenceReport::find(StudySetting s) const {
  for (const auto& sp : settings) {
    if (sp.setting == s) return &sp;
  }
  return nullptr;
}

PreferenceReport preference_report(const std::vector<AnnotationRecord>& records,
                                   const TaskLookup& tasks,
                                   const std::optional<std::vector<StudySetting>>& settings) {
  Selection sel = select(records, tasks, settings);
  PreferenceReport report;
  for (StudySetting s : sel.settings) {
    SettingPreference sp;
    sp.setting = s;
    for (const AnnotationRecord* r : sel.by_setting[index_of(s)]) {
      const StudyTask& t = task_of(tasks, *r);
      ++sp.n_valid;
      if (auto k = kind_of(t, r->first_choice)) ++sp.first_counts[index_of(*k)];
      if (auto k = kind_of(t, r->second_choice)) ++sp.second_counts[index_of(*k)];
      std::set<CounterKind> incorrect;
      std::set<CounterKind> ungrammatical;
      for (const auto& id : r->incorrect_marks) {
        if (auto k = kind_of(t, id)) incorrect.insert(*k);
      }
      for (const auto& id : r->ungrammatical_marks) {
        if (auto k = kind_of(t, id)) ungrammatical.insert(*k);
      }
      for (CounterKind k : incorrect) ++sp.incorrect_counts[index_of(k)];
      for (CounterKind k : ungrammatical) ++sp.ungrammatical_counts[index_of(k)];
    }
    for (size_t k = 0; k < kAllCounterKinds.size(); ++k) {
      sp.first_choice_pct[k] = pct(sp.first_counts[k], sp.n_valid);
      sp.second_choice_pct[k] = pct(sp.second_counts[k], sp.n_valid);
      sp.incorrect_pct[k] = pct(sp.incorrect_counts[k], sp.n_valid);
      sp.ungrammatical_pct[k] = pct(sp.ungrammatical_counts[k], sp.n_valid);
    }
    report.settings.push_back(sp);
  }
  return report;
}

AgreementReport agreement_report(const std::vector<AnnotationRecord>& records,
                                 const TaskLookup& tasks,
                                 const std::optional<std::vector<StudySetting>>& settings) {
  Selection sel = select(records, tasks, settings);
  AgreementReport report;
  for (StudySetting s : sel.settings) {
    SettingAgreement sa;
    sa.setting = s;
    for (const AnnotationRecord* r : sel.by_setting[index_of(s)]) {
      const StudyTask& t = task_of(tasks, *r);
      ++sa.n_valid;
      AgreementBucket& bucket = agrees(r->agreement) ? report.agree : report.disagree;
      if (agrees(r->agreement)) ++sa.n_agreeing;
      ++bucket.n;
      if (auto k = kind_of(t, r->first_choice)) ++bucket.first_counts[index_of(*k)];
    }
    sa.pct_agreeing = pct(sa.n_agreeing, sa.n_valid);
    report.settings.push_back(sa);
  }
  for (AgreementBucket* b : {&report.agree, &report.disagree}) {
    for (size_t k = 0; k < kAllCounterKinds.size(); ++k) {
      if (b->n > 0) b->first_choice_pct[k] = pct(b->first_counts[k], b->n);
    }
  }
  return report;
}

DemographicsReport demographics_report(const std::vector<AnnotationRecord>& records,
                                       const std::vector<AnnotatorProfile>& profiles,
                                       const TaskLookup& tasks,
                                       const std::optional<std::vector<StudySetting>>& settings) {
  Selection sel = select(records, tasks, settings);
  std::map<std::string, Demographics> by_id;
  for (const auto& p : profiles) by_id.emplace(p.annotator_id, p.demographics);

  DemographicsReport report;
  for (StudySetting s : sel.settings) {
    std::set<std::string> annotators;
    for (const AnnotationRecord* r : sel.by_setting[index_of(s)]) {
      annotators.insert(r->annotator_id);
    }
    SettingDemographics sd;
    sd.setting = s;
    sd.n_annotators = static_cast<int>(annotators.size());
    for (const auto& id : annotators) {
      auto it = by_id.find(id);
      const Demographics d = it == by_id.end() ? Demographics{} : it->second;
      ++sd.race.counts[category(d.race)];
      ++sd.gender.counts[category(d.gender)];
    }
    sd.race.n = sd.gender.n = sd.n_annotators;
    fill_distribution(sd.race);
    fill_distribution(sd.gender);
    report.settings.push_back(std::move(sd));
  }
  return report;
}

json to_json(const PreferenceReport& r) {
  json settings = json::array();
  for (const auto& sp : r.settings) {
    settings.push_back(json{{"setting", std::string(to_string(sp.setting))},
                            {"n_valid", sp.n_valid},
                            {"first_choice_pct", per_kind_json(sp.first_choice_pct)},
                            {"second_choice_pct", per_kind_json(sp.second_choice_pct)},
                            {"incorrect_pct", per_kind_json(sp.incorrect_pct)},
                            {"ungrammatical_pct", per_kind_json(sp.ungrammatical_pct)},
                            {"first_counts", per_kind_json(sp.first_counts)},
                            {"second_counts", per_kind_json(sp.second_counts)},
                            {"incorrect_counts", per_kind_json(sp.incorrect_counts)},
                            {"ungrammatical_counts", per_kind_json(sp.ungrammatical_counts)}});
  }
  return json{{"report", "preference"}, {"settings", std::move(settings)}};
}

json to_json(const AgreementReport& r) {
  auto bucket = [](const AgreementBucket& b) {
    return json{{"n", b.n},
                {"first_counts", per_kind_json(b.first_counts)},
                {"first_choice_pct", per_kind_json(b.first_choice_pct)}};
  };
  json settings = json::array();
  for (const auto& sa : r.settings) {
    settings.push_back(json{{"setting", std::string(to_string(sa.setting))},
                            {"n_valid", sa.n_valid},
                            {"n_agreeing", sa.n_agreeing},
                            {"pct_agreeing", round1(sa.pct_agreeing)}});
  }
  return json{{"report", "agreement"},
              {"agree", bucket(r.agree)},
              {"disagree", bucket(r.disagree)},
              {"settings", std::move(settings)}};
}

json to_json(const DemographicsReport& r) {
  json settings = json::array();
  for (const auto& sd : r.settings) {
    settings.push_back(json{{"setting", std::string(to_string(sd.setting))},
                            {"n_annotators", sd.n_annotators},
                            {"race", distribution_json(sd.race)},
                            {"gender", distribution_json(sd.gender)}});
  }
  return json{{"report", "demographics"}, {"settings", std::move(settings)}};
}

std::string format_text(const PreferenceReport& r) {
  std::string out;
  for (const auto& sp : r.settings) {
    out += fmt::format("setting {} (n = {})\n", to_string(sp.setting), sp.n_valid);
    out += kind_header();
    out += kind_row("first %", sp.first_choice_pct);
    out += kind_row("second %", sp.second_choice_pct);
    out += kind_row("incorrect %", sp.incorrect_pct);
    out += kind_row("ungramm. %", sp.ungrammatical_pct);
    out += "\n";
  }
  return out;
}

std::string format_text(const AgreementReport& r) {
  std::string out = "first choice by agreement with the statement\n";
  out += kind_header();
  for (auto [label, b] : {std::pair{"agree", &r.agree}, std::pair{"disagree", &r.disagree}}) {
    std::string row = fmt::format("{:<14}", fmt::format("{} ({})", label, b->n));
    for (const auto& v : b->first_choice_pct) {
      row += v ? fmt::format("{:>9.1f}", *v) : fmt::format("{:>9}", "-");
    }
    out += row + "\n";
  }
  out += "\nannotators agreeing with the statement\n";
  for (const auto& sa : r.settings) {
    out += fmt::format("{:<14}{:>9.1f}  ({} of {})\n", to_string(sa.setting),
                       sa.pct_agreeing, sa.n_agreeing, sa.n_valid);
  }
  return out;
}

std::string format_text(const DemographicsReport& r) {
  std::string out;
  for (const auto& sd : r.settings) {
    out += fmt::format("setting {} ({} annotators)\n", to_string(sd.setting), sd.n_annotators);
    for (auto [label, d] : {std::pair{"race", &sd.race}, std::pair{"gender", &sd.gender}}) {
      for (const auto& [k, v] : d->pct) {
        out += fmt::format("  {:<7}{:<28}{:>6.1f}\n", label, k, v);
      }
    }
    out += "\n";
  }
  return out;
}

}  // namespace countering
