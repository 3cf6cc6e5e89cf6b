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
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "countering/corpus.h"
#include "countering/counter.h"
#include "countering/pipeline.h"
#include "json.hpp"

namespace countering {

class EventLog;

// Which statement(s) the annotator sees. Counterstatements always derive
// from the stereotype, whatever is shown.
enum class StudySetting { kPost, kStereo, kPostStereo };

inline constexpr std::array<StudySetting, 3> kAllSettings = {
    StudySetting::kPost, StudySetting::kStereo, StudySetting::kPostStereo};

// "post", "stereo", "post-stereo".
std::string_view to_string(StudySetting setting);
std::optional<StudySetting> parse_setting(std::string_view name);
constexpr size_t index_of(StudySetting s) { return static_cast<size_t>(s); }

struct TaskOption {
  std::string option_id;
  CounterKind kind;
  std::string text;

  bool operator==(const TaskOption&) const = default;
};

enum class QuestionType { kAgreement, kMark, kFirstChoice, kAttention, kSecondChoice };
std::string_view to_string(QuestionType type);

struct Question {
  QuestionType type;
  std::string option_id;    // kMark only
  std::string instruction;  // kAttention only
};

// Extra "select option N" item. `position` indexes the full question
// sequence and always precedes the second-choice question.
struct AttentionCheck {
  int position = 0;
  std::string expected_option_id;
  std::string instruction;

  bool operator==(const AttentionCheck&) const = default;
};

struct StudyTask {
  std::string task_id;
  StudySetting setting = StudySetting::kPost;
  size_t pair_index = 0;
  std::optional<std::string> shown_post;
  std::optional<std::string> shown_stereotype;
  std::vector<TaskOption> options;  // display order
  AttentionCheck attention_check;
  StereotypePair pair;

  // Agreement, one mark item per option, first choice, second choice, with
  // the attention check spliced in at its position.
  std::vector<Question> questions() const;
  const TaskOption* option(std::string_view option_id) const;

  bool operator==(const StudyTask&) const = default;
};

// Self-reported profile; an empty field means the annotator declined.
struct Demographics {
  std::string race;
  std::string gender;

  bool operator==(const Demographics&) const = default;
};

inline constexpr std::string_view kUndisclosed = "undisclosed";

enum class SubmitStatus { kAccepted, kDiscardedAttention, kRejectedInvalid };
std::string_view to_string(SubmitStatus status);

// Agreement with the shown statement on a 1..5 scale; 4 and 5 count as agree.
inline constexpr int kAgreementMin = 1;
inline constexpr int kAgreementMax = 5;
constexpr bool agrees(int agreement) { return agreement >= 4; }

struct AnnotationRecord {
  std::string task_id;
  std::string annotator_id;  // anonymized
  std::string first_choice;
  std::string second_choice;
  std::set<std::string> incorrect_marks;
  std::set<std::string> ungrammatical_marks;
  int agreement = 0;
  std::string attention_answer;
  // Filled in by the service.
  bool attention_passed = false;
  SubmitStatus status = SubmitStatus::kAccepted;
  std::int64_t timestamp = 0;
  std::uint64_t seq = 0;
  // Accepted on submission but stored only in the annotator's profile.
  std::optional<Demographics> demographics;

  bool operator==(const AnnotationRecord&) const = default;
};

struct AnnotatorProfile {
  std::string annotator_id;
  Demographics demographics;

  bool operator==(const AnnotatorProfile&) const = default;
};

// One task per (entry, setting). Option order and the attention check are
// drawn from a generator seeded by (seed, setting, entry index). Throws
// MissingCounterset for entries without counterstatements.
std::vector<StudyTask> build_tasks(const std::vector<CounterEntry>& entries,
                                   StudySetting setting, std::uint64_t seed);

// Entries that failed to parse are skipped rather than rejected.
std::vector<StudyTask> build_study(const std::vector<CounterEntry>& entries,
                                   const std::vector<StudySetting>& settings,
                                   std::uint64_t seed);

nlohmann::json to_json(const StudyTask& task);
StudyTask task_from_json(const nlohmann::json& j);
// What annotators receive: no counterstatement kinds, no source pair.
nlohmann::json public_task_json(const StudyTask& task);

nlohmann::json to_json(const AnnotationRecord& r);
AnnotationRecord record_from_json(const nlohmann::json& j);
// Parses a client submission; throws MalformedRecord naming bad fields.
AnnotationRecord record_from_request(const nlohmann::json& j);

nlohmann::json to_json(const AnnotatorProfile& p);
AnnotatorProfile profile_from_json(const nlohmann::json& j);

struct SubmitResult {
  SubmitStatus status;
  std::vector<std::string> errors;  // field-level detail for rejections
};

struct ExportFilter {
  std::optional<StudySetting> setting;
  bool only_valid = false;
};

struct ServiceConfig {
  int annotations_per_task = 3;
  std::string salt = "countering-default-salt";
};

using Clock = std::function<std::int64_t()>;
Clock system_clock_ms();

// Task assignment, submission and export. Assignment and closure are
// serialized per task; every state change is appended to the event log
// (when present) before it becomes visible.
class StudyService {
 public:
  explicit StudyService(std::vector<StudyTask> tasks, ServiceConfig config = {},
                        Clock clock = system_clock_ms());
  ~StudyService();

  StudyService(const StudyService&) = delete;
  StudyService& operator=(const StudyService&) = delete;

  // Opens the store in `dir`, creating it from `tasks` if new. An existing
  // store keeps its own tasks; passing a different non-empty task list is an
  // InputError. The event log is replayed to restore state.
  static std::unique_ptr<StudyService> open(const std::filesystem::path& dir,
                                            std::vector<StudyTask> tasks,
                                            ServiceConfig config = {},
                                            Clock clock = system_clock_ms());

  // Read-only view of an existing store; submissions are not persisted.
  // Throws InputError when `dir` holds no store.
  static std::unique_ptr<StudyService> load(const std::filesystem::path& dir,
                                            ServiceConfig config = {});

  std::string anonymize(std::string_view worker_id) const;

  // Throws UnknownTask, TaskClosed or DuplicateAssignment.
  StudyTask assign(const std::string& task_id, const std::string& annotator_id);
  // First open task in `setting` this annotator has not seen, assigned.
  std::optional<StudyTask> next_task(StudySetting setting,
                                     const std::string& annotator_id);

  // Throws UnknownTask, NoOpenAssignment or TaskClosed; invalid content
  // comes back as kRejectedInvalid and is not stored.
  SubmitResult submit(AnnotationRecord record);

  // Returns false when the annotator already has a profile.
  bool set_profile(const std::string& annotator_id, const Demographics& d);
  std::optional<Demographics> profile(const std::string& annotator_id) const;

  std::vector<AnnotationRecord> export_annotations(const ExportFilter& filter = {}) const;
  std::vector<AnnotatorProfile> export_profiles() const;

  const StudyTask& task(const std::string& task_id) const;
  const std::vector<StudyTask>& tasks() const { return tasks_; }
  std::map<std::string, const StudyTask*> task_index() const;

  // Full state as canonical JSON, for replay comparisons.
  nlohmann::json snapshot() const;

 private:
  struct TaskState {
    std::mutex mu;
    std::set<std::string> assigned;  // ever assigned, including completed
    std::set<std::string> open;      // assigned, not yet submitted
    int valid = 0;
    int discarded = 0;
  };

  size_t index_for(const std::string& task_id) const;
  TaskState& state(size_t i) const { return *states_[i]; }
  std::vector<std::string> validate(const StudyTask& task,
                                    const AnnotationRecord& r) const;

  void log_event(const nlohmann::json& event);
  void apply_event(const nlohmann::json& event);
  void replay(const std::vector<nlohmann::json>& events);

  std::vector<StudyTask> tasks_;
  std::map<std::string, size_t> by_id_;
  std::vector<std::unique_ptr<TaskState>> states_;
  ServiceConfig config_;
  Clock clock_;

  std::unique_ptr<EventLog> log_;
  mutable std::shared_mutex data_mu_;  // guards records_, profiles_, seq_
  std::vector<AnnotationRecord> records_;
  std::map<std::string, Demographics> profiles_;
  std::uint64_t seq_ = 0;
};

}  // namespace countering
