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

#include "test_support.h"

#include <fstream>
#include <sstream>

#include "countering/counter.h"
#include "countering/errors.h"
#include "countering/pipeline.h"
#include "countering/random.h"

namespace countering::testing {

namespace fs = std::filesystem;

fs::path fixture_dir() { return COUNTERING_FIXTURE_DIR; }
fs::path data_dir() { return COUNTERING_DATA_DIR; }

TempDir::TempDir() {
  static std::atomic<int> counter{0};
  const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
  path_ = fs::temp_directory_path() /
          ("countering-test-" + std::to_string(stamp) + "-" + std::to_string(counter++));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void ScriptedClient::push(Step step) {
  std::lock_guard lock(mu_);
  steps_.push_back(std::move(step));
}

void ScriptedClient::push_text(std::string text) {
  push([text] { return std::vector<std::string>{text}; });
}

std::vector<std::string> ScriptedClient::complete(const std::string& prompt,
                                                  const CompletionParams&) {
  Step step;
  {
    std::lock_guard lock(mu_);
    ++calls_;
    prompts_.push_back(prompt);
    if (steps_.empty()) throw TransportError("script exhausted", false);
    step = std::move(steps_.front());
    steps_.pop_front();
  }
  return step();
}

std::vector<std::string> ScriptedClient::prompts() const {
  std::lock_guard lock(mu_);
  return prompts_;
}

double TableScorer::score(std::string_view sentence) const {
  double best = 0.0;
  size_t best_len = 0;
  for (const auto& [key, value] : scores_) {
    if (sentence.size() > key.size() && sentence.substr(0, key.size()) == key &&
        sentence[key.size()] == ' ' && key.size() >= best_len) {
      best = value;
      best_len = key.size();
    }
  }
  return best;
}

SyntheticStudy make_synthetic_study(std::uint64_t seed, int n_records, double failure_rate) {
  const GroupLexicon lex = GroupLexicon::defaults();
  const AltGroupMap alt = AltGroupMap::defaults();
  std::vector<Subtype> sub{{"a", SubtypeKind::kSubgroup}, {"b", SubtypeKind::kSubgroup},
                           {"c", SubtypeKind::kSubgroup}};
  std::vector<Subtype> ind{{"x", SubtypeKind::kIndividual}, {"y", SubtypeKind::kIndividual},
                           {"z", SubtypeKind::kIndividual}};
  std::vector<CounterEntry> entries;
  const char* groups[] = {"women", "muslims", "black people", "liberals"};
  for (int i = 0; i < 8; ++i) {
    Generic g = Generic::from_triple(groups[i % 4], "are", "quality" + std::to_string(i), lex);
    StereotypePair pair{"post " + std::to_string(i), g.surface_text, g.canonical_group, 2, {}};
    entries.push_back({pair, generate_all(g, sub, ind, alt), ""});
  }

  SyntheticStudy study;
  study.tasks = build_study(entries, {kAllSettings.begin(), kAllSettings.end()}, seed);

  SeededRng rng(seed);
  const char* races[] = {"white", "black", "asian", ""};
  const char* genders[] = {"woman", "man", ""};
  const int n_annotators = 40;
  for (int a = 0; a < n_annotators; ++a) {
    if (rng.below(5) == 0) continue;  // some annotators never filled the form
    study.profiles.push_back({"ann-" + std::to_string(a),
                              {races[rng.below(4)], genders[rng.below(3)]}});
  }
  for (int i = 0; i < n_records; ++i) {
    const StudyTask& t = study.tasks[rng.below(study.tasks.size())];
    const size_t k = t.options.size();
    AnnotationRecord r;
    r.task_id = t.task_id;
    r.annotator_id = "ann-" + std::to_string(rng.below(n_annotators));
    const size_t first = rng.below(k);
    const size_t second = (first + 1 + rng.below(k - 1)) % k;
    r.first_choice = t.options[first].option_id;
    r.second_choice = t.options[second].option_id;
    for (const auto& o : t.options) {
      if (rng.below(4) == 0) r.incorrect_marks.insert(o.option_id);
      if (rng.below(6) == 0) r.ungrammatical_marks.insert(o.option_id);
    }
    r.agreement = static_cast<int>(1 + rng.below(5));
    r.attention_passed = rng.unit() >= failure_rate;
    r.attention_answer = r.attention_passed ? t.attention_check.expected_option_id : "wrong";
    r.status = r.attention_passed ? SubmitStatus::kAccepted : SubmitStatus::kDiscardedAttention;
    r.seq = static_cast<std::uint64_t>(i + 1);
    study.records.push_back(std::move(r));
  }
  return study;
}

oracle::Cells cells_of(const PreferenceReport& r) {
  oracle::Cells cells;
  for (const auto& sp : r.settings) {
    const std::string s(to_string(sp.setting));
    cells[s + "|n_valid|"] = sp.n_valid;
    for (CounterKind k : kAllCounterKinds) {
      const std::string kn(to_string(k));
      cells[s + "|first|" + kn] = sp.first_choice_pct[index_of(k)];
      cells[s + "|second|" + kn] = sp.second_choice_pct[index_of(k)];
      cells[s + "|incorrect|" + kn] = sp.incorrect_pct[index_of(k)];
      cells[s + "|ungrammatical|" + kn] = sp.ungrammatical_pct[index_of(k)];
    }
  }
  return cells;
}

oracle::Cells cells_of(const AgreementReport& r) {
  oracle::Cells cells;
  for (const auto& sa : r.settings) {
    cells[std::string(to_string(sa.setting)) + "|pct_agreeing|"] = sa.pct_agreeing;
  }
  for (auto [name, b] : {std::pair{"agree", &r.agree}, std::pair{"disagree", &r.disagree}}) {
    cells[std::string(name) + "|n|"] = b->n;
    for (CounterKind k : kAllCounterKinds) {
      if (const auto& v = b->first_choice_pct[index_of(k)]) {
        cells[std::string(name) + "|first|" + std::string(to_string(k))] = *v;
      }
    }
  }
  return cells;
}

oracle::Cells cells_of(const DemographicsReport& r) {
  oracle::Cells cells;
  for (const auto& sd : r.settings) {
    const std::string s(to_string(sd.setting));
    cells[s + "|n_annotators|"] = sd.n_annotators;
    for (const auto& [k, v] : sd.race.pct) cells[s + "|race|" + k] = v;
    for (const auto& [k, v] : sd.gender.pct) cells[s + "|gender|" + k] = v;
  }
  return cells;
}

std::vector<RawAnnotationRow> fuzz_corpus_rows(std::uint64_t seed, int posts) {
  SeededRng rng(seed);
  const std::vector<std::string> stereotypes = {"Women are weak", "women are weak",
                                                " Women are weak", "Black people are lazy",
                                                "Muslims are terrorists", "Jews are greedy", ""};
  const std::vector<std::string> groups = {"women", "black folks", "muslims", "jews",
                                           "Jewish folks", ""};
  std::vector<RawAnnotationRow> rows;
  for (int p = 0; p < posts; ++p) {
    const std::string post = "post number " + std::to_string(p);
    const size_t n = 1 + rng.below(6);
    for (size_t i = 0; i < n; ++i) {
      rows.push_back({post, groups[rng.below(groups.size())],
                      stereotypes[rng.below(stereotypes.size())],
                      "w" + std::to_string(rng.below(5))});
    }
  }
  return rows;
}

}  // namespace countering::testing
