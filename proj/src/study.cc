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

#include "countering/study.h"

#include <algorithm>
#include <chrono>

#include <fmt/format.h>

#include "countering/digest.h"
#include "countering/errors.h"
#include "countering/event_log.h"
#include "countering/random.h"
#include "countering/text.h"
#include "countering/serialization.h"

namespace countering {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 3> kSettingNames = {"post", "stereo",
                                                           "post-stereo"};

std::string option_id_for(size_t display_index) {
  return fmt::format("o{}", display_index + 1);
}

json string_set(const std::set<std::string>& s) {
  json a = json::array();
  for (const auto& v : s) a.push_back(v);
  return a;
}

json demographics_json(const Demographics& d) {
  return json{{"race", d.race}, {"gender", d.gender}};
}

Demographics demographics_from(const json& j) {
  return Demographics{j.value("race", std::string()), j.value("gender", std::string())};
}

// Declined answers are stored explicitly.
Demographics disclosed(Demographics d) {
  if (text::trim(d.race).empty()) d.race = std::string(kUndisclosed);
  if (text::trim(d.gender).empty()) d.gender = std::string(kUndisclosed);
  return d;
}

SubmitStatus parse_status(std::string_view s) {
  if (s == "accepted") return SubmitStatus::kAccepted;
  if (s == "discarded_attention") return SubmitStatus::kDiscardedAttention;
  if (s == "rejected_invalid") return SubmitStatus::kRejectedInvalid;
  throw InputError(fmt::format("unknown record status '{}'", s));
}

}  // namespace

std::string_view to_string(StudySetting setting) {
  return kSettingNames[index_of(setting)];
}

std::optional<StudySetting> parse_setting(std::string_view name) {
  for (StudySetting s : kAllSettings) {
    if (to_string(s) == name) return s;
  }
  if (name == "post+stereo" || name == "post_stereo") return StudySetting::kPostStereo;
  return std::nullopt;
}

std::string_view to_string(QuestionType type) {
  switch (type) {
    case QuestionType::kAgreement: return "agreement";
    case QuestionType::kMark: return "mark";
    case QuestionType::kFirstChoice: return "first_choice";
    case QuestionType::kAttention: return "attention";
    case QuestionType::kSecondChoice: return "second_choice";
  }
  return "unknown";
}

std::string_view to_string(SubmitStatus status) {
  switch (status) {
    case SubmitStatus::kAccepted: return "accepted";
    case SubmitStatus::kDiscardedAttention: return "discarded_attention";
    case SubmitStatus::kRejectedInvalid: return "rejected_invalid";
  }
  return "unknown";
}

std::vector<Question> StudyTask::questions() const {
  std::vector<Question> qs;
  qs.push_back({QuestionType::kAgreement, "", ""});
  for (const auto& o : options) qs.push_back({QuestionType::kMark, o.option_id, ""});
  qs.push_back({QuestionType::kFirstChoice, "", ""});
  qs.push_back({QuestionType::kSecondChoice, "", ""});
  const size_t pos = std::min<size_t>(attention_check.position, qs.size() - 1);
  qs.insert(qs.begin() + static_cast<std::ptrdiff_t>(pos),
            {QuestionType::kAttention, attention_check.expected_option_id,
             attention_check.instruction});
  return qs;
}

const TaskOption* StudyTask::option(std::string_view option_id) const {
  for (const auto& o : options) {
    if (o.option_id == option_id) return &o;
  }
  return nullptr;
}

std::vector<StudyTask> build_tasks(const std::vector<CounterEntry>& entries,
                                   StudySetting setting, std::uint64_t seed) {
  std::vector<StudyTask> tasks;
  tasks.reserve(entries.size());
  for (size_t i = 0; i < entries.size(); ++i) {
    const CounterEntry& e = entries[i];
    if (!e.counters || e.counters->statements.empty()) {
      throw MissingCounterset(fmt::format("pair {} ('{}') has no counterstatements", i,
                                          e.pair.stereotype_text));
    }
    StudyTask t;
    t.task_id = fmt::format("{}-{:04}", to_string(setting), i);
    t.setting = setting;
    t.pair_index = i;
    t.pair = e.pair;
    if (setting != StudySetting::kStereo) t.shown_post = e.pair.post_text;
    if (setting != StudySetting::kPost) t.shown_stereotype = e.pair.stereotype_text;

    SeededRng rng(derive_seed(seed, fmt::format("task|{}|{}", to_string(setting), i)));
    std::vector<const Counterstatement*> order;
    for (const auto& cs : e.counters->statements) order.push_back(&cs);
    rng.shuffle(std::span<const Counterstatement*>(order));
    for (size_t k = 0; k < order.size(); ++k) {
      t.options.push_back({option_id_for(k), order[k]->kind, order[k]->full_text});
    }

    // Slots 0..k+2 all precede the second-choice question (agreement, k
    // marks, first choice come before it).
    const size_t k = t.options.size();
    t.attention_check.position = static_cast<int>(rng.below(k + 3));
    const size_t target = rng.below(k);
    t.attention_check.expected_option_id = t.options[target].option_id;
    t.attention_check.instruction = fmt::format(
        "Attention check: please select option {} for this question.", target + 1);
    tasks.push_back(std::move(t));
  }
  return tasks;
}

std::vector<StudyTask> build_study(const std::vector<CounterEntry>& entries,
                                   const std::vector<StudySetting>& settings,
                                   std::uint64_t seed) {
  std::vector<CounterEntry> usable;
  for (const auto& e : entries) {
    if (e.counters && !e.counters->statements.empty()) usable.push_back(e);
  }
  std::vector<StudyTask> all;
  for (StudySetting s : settings) {
    auto tasks = build_tasks(usable, s, seed);
    all.insert(all.end(), std::make_move_iterator(tasks.begin()),
               std::make_move_iterator(tasks.end()));
  }
  return all;
}

json to_json(const StudyTask& t) {
  json options = json::array();
  for (const auto& o : t.options) {
    options.push_back(json{{"option_id", o.option_id},
                           {"kind", std::string(to_string(o.kind))},
                           {"text", o.text}});
  }
  json j{{"task_id", t.task_id},
         {"setting", std::string(to_string(t.setting))},
         {"pair_index", t.pair_index},
         {"options", std::move(options)},
         {"attention_check", json{{"position", t.attention_check.position},
                                  {"expected_option_id", t.attention_check.expected_option_id},
                                  {"instruction", t.attention_check.instruction}}},
         {"pair", to_json(t.pair)}};
  j["shown_post"] = t.shown_post ? json(*t.shown_post) : json(nullptr);
  j["shown_stereotype"] = t.shown_stereotype ? json(*t.shown_stereotype) : json(nullptr);
  return j;
}

StudyTask task_from_json(const json& j) {
  StudyTask t;
  t.task_id = j.at("task_id").get<std::string>();
  auto setting = parse_setting(j.at("setting").get<std::string>());
  if (!setting) throw InputError("unknown setting " + j.at("setting").dump());
  t.setting = *setting;
  t.pair_index = j.at("pair_index").get<size_t>();
  for (const auto& o : j.at("options")) {
    auto kind = parse_counter_kind(o.at("kind").get<std::string>());
    if (!kind) throw InputError("unknown kind " + o.at("kind").dump());
    t.options.push_back({o.at("option_id").get<std::string>(), *kind,
                         o.at("text").get<std::string>()});
  }
  const auto& ac = j.at("attention_check");
  t.attention_check = {ac.at("position").get<int>(),
                       ac.at("expected_option_id").get<std::string>(),
                       ac.at("instruction").get<std::string>()};
  t.pair = pair_from_json(j.at("pair"));
  if (!j.at("shown_post").is_null()) t.shown_post = j.at("shown_post").get<std::string>();
  if (!j.at("shown_stereotype").is_null()) {
    t.shown_stereotype = j.at("shown_stereotype").get<std::string>();
  }
  return t;
}

json public_task_json(const StudyTask& t) {
  json j{{"task_id", t.task_id}, {"setting", std::string(to_string(t.setting))}};
  if (t.shown_post) j["post"] = *t.shown_post;
  if (t.shown_stereotype) j["stereotype"] = *t.shown_stereotype;
  json options = json::array();
  for (size_t i = 0; i < t.options.size(); ++i) {
    options.push_back(json{{"option_id", t.options[i].option_id},
                           {"position", i + 1},
                           {"text", t.options[i].text}});
  }
  j["options"] = std::move(options);
  json questions = json::array();
  for (const Question& q : t.questions()) {
    json item{{"type", std::string(to_string(q.type))}};
    if (q.type == QuestionType::kMark) item["option_id"] = q.option_id;
    if (q.type == QuestionType::kAttention) item["instruction"] = q.instruction;
    questions.push_back(std::move(item));
  }
  j["questions"] = std::move(questions);
  j["agreement_scale"] = json{{"min", kAgreementMin}, {"max", kAgreementMax}};
  return j;
}

json to_json(const AnnotationRecord& r) {
  return json{{"task_id", r.task_id},
              {"annotator_id", r.annotator_id},
              {"first_choice", r.first_choice},
              {"second_choice", r.second_choice},
              {"incorrect_marks", string_set(r.incorrect_marks)},
              {"ungrammatical_marks", string_set(r.ungrammatical_marks)},
              {"agreement", r.agreement},
              {"attention_answer", r.attention_answer},
              {"attention_passed", r.attention_passed},
              {"status", std::string(to_string(r.status))},
              {"timestamp", r.timestamp},
              {"seq", r.seq}};
}

AnnotationRecord record_from_json(const json& j) {
  AnnotationRecord r;
  r.task_id = j.at("task_id").get<std::string>();
  r.annotator_id = j.at("annotator_id").get<std::string>();
  r.first_choice = j.at("first_choice").get<std::string>();
  r.second_choice = j.at("second_choice").get<std::string>();
  for (const auto& m : j.at("incorrect_marks")) r.incorrect_marks.insert(m.get<std::string>());
  for (const auto& m : j.at("ungrammatical_marks")) {
    r.ungrammatical_marks.insert(m.get<std::string>());
  }
  r.agreement = j.at("agreement").get<int>();
  r.attention_answer = j.at("attention_answer").get<std::string>();
  r.attention_passed = j.at("attention_passed").get<bool>();
  r.status = parse_status(j.at("status").get<std::string>());
  r.timestamp = j.at("timestamp").get<std::int64_t>();
  r.seq = j.at("seq").get<std::uint64_t>();
  return r;
}

AnnotationRecord record_from_request(const json& j) {
  std::vector<std::string> errors;
  if (!j.is_object()) throw MalformedRecord({"body: expected a JSON object"});
  AnnotationRecord r;
  auto str = [&](const char* field, std::string& dst) {
    if (!j.contains(field)) {
      errors.push_back(fmt::format("{}: missing", field));
    } else if (!j[field].is_string()) {
      errors.push_back(fmt::format("{}: expected a string", field));
    } else {
      dst = j[field].get<std::string>();
    }
  };
  auto str_set = [&](const char* field, std::set<std::string>& dst) {
    if (!j.contains(field) || j[field].is_null()) return;
    if (!j[field].is_array()) {
      errors.push_back(fmt::format("{}: expected an array of option ids", field));
      return;
    }
    for (const auto& v : j[field]) {
      if (!v.is_string()) {
        errors.push_back(fmt::format("{}: expected an array of option ids", field));
        return;
      }
      dst.insert(v.get<std::string>());
    }
  };
  str("task_id", r.task_id);
  str("annotator_id", r.annotator_id);
  str("first_choice", r.first_choice);
  str("second_choice", r.second_choice);
  str("attention_answer", r.attention_answer);
  str_set("incorrect_marks", r.incorrect_marks);
  str_set("ungrammatical_marks", r.ungrammatical_marks);
  if (!j.contains("agreement")) {
    errors.push_back("agreement: missing");
  } else if (!j["agreement"].is_number_integer()) {
    errors.push_back("agreement: expected an integer");
  } else {
    r.agreement = j["agreement"].get<int>();
  }
  if (j.contains("demographics") && !j["demographics"].is_null()) {
    const auto& d = j["demographics"];
    if (!d.is_object()) {
      errors.push_back("demographics: expected an object");
    } else {
      r.demographics = demographics_from(d);
    }
  }
  if (!errors.empty()) throw MalformedRecord(std::move(errors));
  return r;
}

json to_json(const AnnotatorProfile& p) {
  return json{{"annotator_id", p.annotator_id},
              {"demographics", demographics_json(p.demographics)}};
}

AnnotatorProfile profile_from_json(const json& j) {
  return AnnotatorProfile{j.at("annotator_id").get<std::string>(),
                          demographics_from(j.at("demographics"))};
}

Clock system_clock_ms() {
  return [] {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
  };
}

StudyService::StudyService(std::vector<StudyTask> tasks, ServiceConfig config, Clock clock)
    : tasks_(std::move(tasks)), config_(std::move(config)), clock_(std::move(clock)) {
  for (size_t i = 0; i < tasks_.size(); ++i) {
    if (!by_id_.emplace(tasks_[i].task_id, i).second) {
      throw InputError(fmt::format("duplicate task id {}", tasks_[i].task_id));
    }
    states_.push_back(std::make_unique<TaskState>());
  }
}

StudyService::~StudyService() = default;

std::unique_ptr<StudyService> StudyService::open(const std::filesystem::path& dir,
                                                 std::vector<StudyTask> tasks,
                                                 ServiceConfig config, Clock clock) {
  std::filesystem::create_directories(dir);
  const auto tasks_path = dir / "tasks.jsonl";
  if (std::filesystem::exists(tasks_path)) {
    auto stored = read_tasks_file(tasks_path);
    if (!tasks.empty() && tasks != stored) {
      throw InputError(fmt::format(
          "store {} was created from a different task set", dir.string()));
    }
    tasks = std::move(stored);
  } else {
    write_tasks_file(tasks_path, tasks);
  }
  auto service = std::make_unique<StudyService>(std::move(tasks), std::move(config),
                                                std::move(clock));
  auto log = std::make_unique<EventLog>(dir / "events.log");
  service->replay(log->existing());
  service->log_ = std::move(log);
  return service;
}

std::unique_ptr<StudyService> StudyService::load(const std::filesystem::path& dir,
                                                 ServiceConfig config) {
  const auto tasks_path = dir / "tasks.jsonl";
  const auto log_path = dir / "events.log";
  if (!std::filesystem::exists(tasks_path) || !std::filesystem::exists(log_path)) {
    throw InputError(fmt::format("{} is not a study store", dir.string()));
  }
  auto service = std::make_unique<StudyService>(read_tasks_file(tasks_path), std::move(config));
  service->replay(read_events(log_path));
  return service;
}

std::string StudyService::anonymize(std::string_view worker_id) const {
  return "a-" + sha256_hex(config_.salt + "\n" + std::string(worker_id)).substr(0, 16);
}

size_t StudyService::index_for(const std::string& task_id) const {
  auto it = by_id_.find(task_id);
  if (it == by_id_.end()) throw UnknownTask(fmt::format("unknown task '{}'", task_id));
  return it->second;
}

const StudyTask& StudyService::task(const std::string& task_id) const {
  return tasks_[index_for(task_id)];
}

std::map<std::string, const StudyTask*> StudyService::task_index() const {
  std::map<std::string, const StudyTask*> index;
  for (const auto& t : tasks_) index.emplace(t.task_id, &t);
  return index;
}

void StudyService::log_event(const json& event) {
  // Caller holds data_mu_ exclusively and the task lock when applicable.
  json e = event;
  e["seq"] = ++seq_;
  e["ts"] = clock_();
  if (log_) log_->append(e);
  apply_event(e);
}

void StudyService::apply_event(const json& e) {
  const std::string type = e.at("type").get<std::string>();
  seq_ = std::max<std::uint64_t>(seq_, e.value("seq", std::uint64_t{0}));
  if (type == "assign") {
    TaskState& st = state(index_for(e.at("task_id").get<std::string>()));
    const auto who = e.at("annotator_id").get<std::string>();
    st.assigned.insert(who);
    st.open.insert(who);
  } else if (type == "record") {
    AnnotationRecord r = record_from_json(e.at("record"));
    r.seq = e.value("seq", r.seq);
    TaskState& st = state(index_for(r.task_id));
    st.open.erase(r.annotator_id);
    if (r.status == SubmitStatus::kAccepted) {
      ++st.valid;
    } else {
      ++st.discarded;
    }
    records_.push_back(std::move(r));
  } else if (type == "profile") {
    AnnotatorProfile p = profile_from_json(e.at("profile"));
    profiles_.emplace(p.annotator_id, p.demographics);
  } else {
    throw InputError(fmt::format("unknown event type '{}'", type));
  }
}

void StudyService::replay(const std::vector<json>& events) {
  std::unique_lock lock(data_mu_);
  for (const auto& e : events) apply_event(e);
}

StudyTask StudyService::assign(const std::string& task_id, const std::string& annotator_id) {
  const size_t i = index_for(task_id);
  TaskState& st = state(i);
  std::lock_guard task_lock(st.mu);
  if (st.valid >= config_.annotations_per_task) {
    throw TaskClosed(fmt::format("task {} already has {} valid annotations", task_id,
                                 st.valid));
  }
  if (st.assigned.count(annotator_id)) {
    throw DuplicateAssignment(
        fmt::format("annotator {} was already given task {}", annotator_id, task_id));
  }
  std::unique_lock lock(data_mu_);
  log_event(json{{"type", "assign"}, {"task_id", task_id}, {"annotator_id", annotator_id}});
  return tasks_[i];
}

std::optional<StudyTask> StudyService::next_task(StudySetting setting,
                                                 const std::string& annotator_id) {
  const int quota = config_.annotations_per_task;
  // Prefer tasks whose outstanding assignments cannot overfill them; fall
  // back to any task still short of its quota.
  for (int pass = 0; pass < 2; ++pass) {
    for (size_t i = 0; i < tasks_.size(); ++i) {
      if (tasks_[i].setting != setting) continue;
      TaskState& st = state(i);
      std::lock_guard task_lock(st.mu);
      if (st.valid >= quota || st.assigned.count(annotator_id)) continue;
      if (pass == 0 && st.valid + static_cast<int>(st.open.size()) >= quota) continue;
      std::unique_lock lock(data_mu_);
      log_event(json{{"type", "assign"},
                     {"task_id", tasks_[i].task_id},
                     {"annotator_id", annotator_id}});
      return tasks_[i];
    }
  }
  return std::nullopt;
}

std::vector<std::string> StudyService::validate(const StudyTask& task,
                                                const AnnotationRecord& r) const {
  std::vector<std::string> errors;
  auto known = [&](const std::string& id) { return task.option(id) != nullptr; };
  if (!known(r.first_choice)) {
    errors.push_back(fmt::format("first_choice: unknown option '{}'", r.first_choice));
  }
  if (!known(r.second_choice)) {
    errors.push_back(fmt::format("second_choice: unknown option '{}'", r.second_choice));
  }
  if (r.first_choice == r.second_choice) {
    errors.push_back("second_choice: must differ from first_choice");
  }
  for (const auto& m : r.incorrect_marks) {
    if (!known(m)) errors.push_back(fmt::format("incorrect_marks: unknown option '{}'", m));
  }
  for (const auto& m : r.ungrammatical_marks) {
    if (!known(m)) {
      errors.push_back(fmt::format("ungrammatical_marks: unknown option '{}'", m));
    }
  }
  if (r.agreement < kAgreementMin || r.agreement > kAgreementMax) {
    errors.push_back(fmt::format("agreement: must be in [{}, {}]", kAgreementMin,
                                 kAgreementMax));
  }
  if (!known(r.attention_answer)) {
    errors.push_back(
        fmt::format("attention_answer: unknown option '{}'", r.attention_answer));
  }
  return errors;
}

SubmitResult StudyService::submit(AnnotationRecord record) {
  const size_t i = index_for(record.task_id);
  const StudyTask& task = tasks_[i];
  TaskState& st = state(i);
  std::lock_guard task_lock(st.mu);
  if (!st.open.count(record.annotator_id)) {
    throw NoOpenAssignment(fmt::format("annotator {} holds no open assignment for {}",
                                       record.annotator_id, record.task_id));
  }
  if (st.valid >= config_.annotations_per_task) {
    throw TaskClosed(fmt::format("task {} is closed", record.task_id));
  }
  if (auto errors = validate(task, record); !errors.empty()) {
    return {SubmitStatus::kRejectedInvalid, std::move(errors)};
  }
  record.attention_passed =
      record.attention_answer == task.attention_check.expected_option_id;
  record.status = record.attention_passed ? SubmitStatus::kAccepted
                                          : SubmitStatus::kDiscardedAttention;
  std::optional<Demographics> demographics = std::move(record.demographics);
  record.demographics.reset();

  std::unique_lock lock(data_mu_);
  record.timestamp = clock_();
  if (demographics && !profiles_.count(record.annotator_id)) {
    log_event(json{{"type", "profile"},
                   {"profile",
                    to_json(AnnotatorProfile{record.annotator_id, disclosed(*demographics)})}});
  }
  record.seq = seq_ + 1;
  log_event(json{{"type", "record"}, {"record", to_json(record)}});
  return {record.status, {}};
}

bool StudyService::set_profile(const std::string& annotator_id, const Demographics& d) {
  std::unique_lock lock(data_mu_);
  if (profiles_.count(annotator_id)) return false;
  log_event(json{{"type", "profile"},
                 {"profile", to_json(AnnotatorProfile{annotator_id, disclosed(d)})}});
  return true;
}

std::optional<Demographics> StudyService::profile(const std::string& annotator_id) const {
  std::shared_lock lock(data_mu_);
  auto it = profiles_.find(annotator_id);
  if (it == profiles_.end()) return std::nullopt;
  return it->second;
}

std::vector<AnnotationRecord> StudyService::export_annotations(
    const ExportFilter& filter) const {
  std::vector<AnnotationRecord> out;
  {
    std::shared_lock lock(data_mu_);
    for (const auto& r : records_) {
      if (filter.only_valid && !r.attention_passed) continue;
      if (filter.setting && tasks_[index_for(r.task_id)].setting != *filter.setting) continue;
      out.push_back(r);
    }
  }
  std::sort(out.begin(), out.end(), [](const AnnotationRecord& a, const AnnotationRecord& b) {
    return std::tie(a.task_id, a.timestamp, a.seq) < std::tie(b.task_id, b.timestamp, b.seq);
  });
  return out;
}

std::vector<AnnotatorProfile> StudyService::export_profiles() const {
  std::shared_lock lock(data_mu_);
  std::vector<AnnotatorProfile> out;
  for (const auto& [id, d] : profiles_) out.push_back({id, d});
  return out;
}

json StudyService::snapshot() const {
  json tasks = json::object();
  for (size_t i = 0; i < tasks_.size(); ++i) {
    TaskState& st = state(i);
    std::lock_guard task_lock(st.mu);
    tasks[tasks_[i].task_id] = json{{"assigned", string_set(st.assigned)},
                                    {"open", string_set(st.open)},
                                    {"valid", st.valid},
                                    {"discarded", st.discarded}};
  }
  std::shared_lock lock(data_mu_);
  json records = json::array();
  for (const auto& r : records_) records.push_back(to_json(r));
  json profiles = json::array();
  for (const auto& [id, d] : profiles_) profiles.push_back(to_json(AnnotatorProfile{id, d}));
  return json{{"tasks", std::move(tasks)},
              {"records", std::move(records)},
              {"profiles", std::move(profiles)},
              {"seq", seq_}};
}

}  // namespace countering
