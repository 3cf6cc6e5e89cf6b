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

#include "countering/corpus.h"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <fmt/format.h>

#include "countering/errors.h"
#include "countering/serialization.h"
#include "countering/text.h"

namespace countering {

namespace {

char detect_delimiter(std::string_view header_line) {
  size_t commas = 0;
  size_t tabs = 0;
  bool quoted = false;
  for (char c : header_line) {
    if (c == '"') quoted = !quoted;
    if (quoted) continue;
    if (c == ',') ++commas;
    if (c == '\t') ++tabs;
  }
  return tabs > commas ? '\t' : ',';
}

std::optional<size_t> find_column(const std::vector<std::string>& header,
                                  const std::vector<std::string>& aliases) {
  for (const auto& alias : aliases) {
    for (size_t i = 0; i < header.size(); ++i) {
      if (header[i] == alias) return i;
    }
  }
  return std::nullopt;
}

// SBIC stores some group labels as list literals, e.g. ["women"].
std::string clean_group_label(std::string_view raw) {
  std::string s = text::trim(raw);
  if (s.size() >= 2 && s.front() == '[' && s.back() == ']') {
    s = s.substr(1, s.size() - 2);
    auto comma = s.find(',');
    if (comma != std::string::npos) s = s.substr(0, comma);
    s.erase(std::remove_if(s.begin(), s.end(),
                           [](char c) { return c == '"' || c == '\''; }),
            s.end());
  }
  return text::trim(s);
}

}  // namespace

ColumnMapping ColumnMapping::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  ColumnMapping m;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = text::trim(line);
    if (t.empty() || t[0] == '#') continue;
    auto tab = t.find('\t');
    if (tab == std::string::npos) {
      throw InputError(fmt::format("{}:{}: expected field<TAB>column", path.string(), lineno));
    }
    std::string field = text::trim(t.substr(0, tab));
    std::vector<std::string> column{text::trim(t.substr(tab + 1))};
    if (field == "post") m.post = column;
    else if (field == "target_group") m.target_group = column;
    else if (field == "target_stereotype") m.target_stereotype = column;
    else if (field == "annotator_id") m.annotator_id = column;
    else throw InputError(fmt::format("{}:{}: unknown field '{}'", path.string(), lineno, field));
  }
  return m;
}

Table read_delimited(std::istream& in) {
  Table table;
  std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (data.starts_with("\xEF\xBB\xBF")) data.erase(0, 3);
  if (data.empty()) return table;
  table.delimiter = detect_delimiter(std::string_view(data).substr(0, data.find('\n')));

  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool field_started = false;
  auto end_field = [&] {
    record.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    if (!(record.size() == 1 && record[0].empty())) records.push_back(std::move(record));
    record.clear();
  };
  for (size_t i = 0; i < data.size(); ++i) {
    char c = data[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < data.size() && data[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += c;
      }
      continue;
    }
    if (c == '"' && !field_started) {
      quoted = true;
      field_started = true;
    } else if (c == table.delimiter) {
      end_field();
    } else if (c == '\n') {
      if (!field.empty() && field.back() == '\r') field.pop_back();
      end_record();
    } else {
      field += c;
      field_started = true;
    }
  }
  if (!field.empty() || !record.empty()) end_record();

  if (records.empty()) return table;
  table.header = std::move(records.front());
  for (auto& h : table.header) h = text::trim(h);
  table.rows.assign(std::make_move_iterator(records.begin() + 1),
                    std::make_move_iterator(records.end()));
  return table;
}

std::vector<RawAnnotationRow> rows_from_table(const Table& table,
                                              const ColumnMapping& mapping,
                                              IngestReport& report) {
  struct Field {
    const char* name;
    const std::vector<std::string>& aliases;
  };
  const Field fields[] = {{"post", mapping.post},
                          {"target_group", mapping.target_group},
                          {"target_stereotype", mapping.target_stereotype},
                          {"annotator_id", mapping.annotator_id}};
  std::array<size_t, 4> idx{};
  for (size_t f = 0; f < 4; ++f) {
    auto col = find_column(table.header, fields[f].aliases);
    if (!col) {
      throw InputError(fmt::format("input header lacks a column for '{}' (tried: {})",
                                   fields[f].name, text::join(fields[f].aliases, ", ")));
    }
    idx[f] = *col;
  }

  std::vector<RawAnnotationRow> rows;
  rows.reserve(table.rows.size());
  for (const auto& r : table.rows) {
    ++report.rows_read;
    if (r.size() != table.header.size()) {
      ++report.malformed_rows;
      continue;
    }
    RawAnnotationRow row{text::trim(r[idx[0]]), clean_group_label(r[idx[1]]),
                         r[idx[2]], text::trim(r[idx[3]])};
    if (row.post.empty() || row.annotator_id.empty()) {
      ++report.malformed_rows;
      continue;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<RawAnnotationRow> read_annotation_rows(const std::filesystem::path& path,
                                                   const ColumnMapping& mapping,
                                                   IngestReport& report) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  Table table = read_delimited(in);
  if (table.header.empty()) throw EmptyInput(fmt::format("{}: no rows", path.string()));
  return rows_from_table(table, mapping, report);
}

ExtractionResult extract_pairs(const std::vector<RawAnnotationRow>& rows,
                               const GroupLexicon& lexicon) {
  ExtractionResult result;
  IngestReport& report = result.report;

  // post -> indices of rows carrying a stereotype
  std::map<std::string, std::vector<size_t>> by_post;
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (r.post.empty() || r.annotator_id.empty()) {
      ++report.malformed_rows;
      continue;
    }
    auto& slot = by_post[r.post];
    if (text::trim(r.target_stereotype).empty()) {
      ++report.empty_stereotype_rows;
      continue;
    }
    slot.push_back(i);
  }
  report.posts = by_post.size();

  for (const auto& [post, indices] : by_post) {
    if (indices.size() < 3) continue;
    ++report.posts_with_enough_annotations;

    std::map<std::string, std::vector<size_t>> by_stereotype;
    for (size_t i : indices) by_stereotype[text::trim(rows[i].target_stereotype)].push_back(i);

    for (const auto& [stereotype, support_rows] : by_stereotype) {
      std::set<std::string> annotators;
      std::map<std::string, int> group_votes;
      for (size_t i : support_rows) {
        annotators.insert(rows[i].annotator_id);
        if (!rows[i].target_group.empty()) {
          ++group_votes[normalize_group(rows[i].target_group, lexicon)];
        }
      }
      if (annotators.size() < 2) continue;
      // Modal group; std::map order breaks ties toward the smallest name.
      std::string group;
      int best = 0;
      for (const auto& [g, votes] : group_votes) {
        if (votes > best) {
          best = votes;
          group = g;
        }
      }
      result.pairs.push_back({post, stereotype, group,
                              static_cast<int>(annotators.size()), std::nullopt});
    }
  }

  std::sort(result.pairs.begin(), result.pairs.end(),
            [](const StereotypePair& a, const StereotypePair& b) {
              return std::tie(a.group, a.post_text, a.stereotype_text) <
                     std::tie(b.group, b.post_text, b.stereotype_text);
            });
  return result;
}

std::map<std::string, int> group_counts(const std::vector<StereotypePair>& pairs) {
  std::map<std::string, int> counts;
  for (const auto& p : pairs) ++counts[p.group];
  return counts;
}

std::string format_group_table(const std::map<std::string, int>& counts) {
  std::vector<std::pair<std::string, int>> rows(counts.begin(), counts.end());
  std::stable_sort(rows.begin(), rows.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  size_t width = std::string_view("Group").size();
  int total = 0;
  for (const auto& [g, n] : rows) {
    width = std::max(width, g.size());
    total += n;
  }
  std::string out = fmt::format("{:<{}}  {:>11}\n", "Group", width, "Nb Examples");
  for (const auto& [g, n] : rows) out += fmt::format("{:<{}}  {:>11}\n", g, width, n);
  out += fmt::format("{} pairs, {} groups\n", total, rows.size());
  return out;
}

void write_pairs(std::ostream& out, const std::vector<StereotypePair>& pairs) {
  for (const auto& p : pairs) out << to_json(p).dump() << "\n";
}

std::vector<StereotypePair> read_pairs(std::istream& in) {
  std::vector<StereotypePair> pairs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      pairs.push_back(pair_from_json(nlohmann::json::parse(line)));
    } catch (const nlohmann::json::exception& e) {
      throw InputError(fmt::format("pairs line {}: {}", lineno, e.what()));
    }
  }
  return pairs;
}

std::vector<StereotypePair> load_pairs(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError(fmt::format("cannot open {}", path.string()));
  return read_pairs(in);
}

}  // namespace countering
