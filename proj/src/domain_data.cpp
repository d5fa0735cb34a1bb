/*
 * Copyright 2026 The atrisk Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "atrisk/domain_data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "atrisk/csv.hpp"

namespace atrisk {

bool OperationVocab::contains(std::string_view op) const {
  return std::find(names.begin(), names.end(), op) != names.end();
}

OperationVocab OperationVocab::standard() {
  return {{"OPEN", "CLOSE", "NEXT", "PREV", "ADD_MARKER", "DELETE_MARKER",
           "ADD_MEMO", "DELETE_MEMO", "PAGE_JUMP"}};
}

void sort_events(std::vector<EventRecord>& records) {
  std::stable_sort(records.begin(), records.end(),
                   [](const EventRecord& a, const EventRecord& b) {
                     if (a.student_id != b.student_id) {
                       return a.student_id < b.student_id;
                     }
                     return a.event_time < b.event_time;
                   });
}

EventLog parse_events(std::istream& in, const OperationVocab& vocab,
                      std::string_view source) {
  const CsvTable table = parse_csv(in, source);
  const std::size_t c_student = table.column("student_id", source);
  const std::size_t c_material = table.column("material_id", source);
  const std::size_t c_op = table.column("operation", source);
  const std::size_t c_time = table.column("event_time", source);
  if (table.rows.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                std::string(source) + ": no event rows");
  }

  EventLog log;
  log.records.reserve(table.rows.size());
  for (const CsvRow& row : table.rows) {
    if (row.fields.size() != table.header.size()) {
      throw Error(ErrorCode::kParse, std::string(source) + ":" +
                                         std::to_string(row.line) +
                                         ": wrong number of fields");
    }
    EventRecord rec;
    rec.student_id = row.fields[c_student];
    rec.material_id = row.fields[c_material];
    if (rec.student_id.empty()) {
      throw Error(ErrorCode::kParse, std::string(source) + ":" +
                                         std::to_string(row.line) +
                                         ": empty student_id");
    }
    if (!parse_rfc3339(row.fields[c_time], &rec.event_time)) {
      throw Error(ErrorCode::kParse,
                  std::string(source) + ":" + std::to_string(row.line) +
                      ": malformed event_time '" + row.fields[c_time] + "'");
    }
    const std::string& op = row.fields[c_op];
    if (vocab.contains(op) || op == kOtherOperation) {
      rec.operation = op;
    } else {
      rec.operation = kOtherOperation;
      ++log.unknown_operation_count;
      ++log.unknown_operations[op];
    }
    log.records.push_back(std::move(rec));
  }
  sort_events(log.records);
  return log;
}

EventLog ingest_events(const std::filesystem::path& path,
                       const OperationVocab& vocab) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  }
  return parse_events(in, vocab, path.string());
}

void write_events(std::ostream& out, std::span<const EventRecord> records) {
  out << "student_id,material_id,operation,event_time\n";
  for (const EventRecord& r : records) {
    out << r.student_id << ',' << r.material_id << ',' << r.operation << ','
        << format_rfc3339(r.event_time) << '\n';
  }
}

bool parse_grade(std::string_view text, Grade* out) {
  if (text.size() != 1) return false;
  switch (text[0]) {
    case 'F': case 'f': *out = Grade::kF; return true;
    case 'D': case 'd': *out = Grade::kD; return true;
    case 'C': case 'c': *out = Grade::kC; return true;
    case 'B': case 'b': *out = Grade::kB; return true;
    case 'A': case 'a': *out = Grade::kA; return true;
    default: return false;
  }
}

char grade_letter(Grade g) { return "FDCBA"[static_cast<int>(g) - 1]; }

std::vector<GradeRecord> parse_grades(std::istream& in,
                                      std::string_view source) {
  const CsvTable table = parse_csv(in, source);
  const std::size_t c_student = table.column("student_id", source);
  const std::size_t c_grade = table.column("grade", source);
  if (table.rows.empty()) {
    throw Error(ErrorCode::kEmptyInput, std::string(source) + ": no grade rows");
  }
  std::vector<GradeRecord> out;
  std::set<std::string> seen;
  for (const CsvRow& row : table.rows) {
    const std::string where = std::string(source) + ":" + std::to_string(row.line);
    if (row.fields.size() != table.header.size()) {
      throw Error(ErrorCode::kParse, where + ": wrong number of fields");
    }
    GradeRecord rec;
    rec.student_id = row.fields[c_student];
    if (!parse_grade(row.fields[c_grade], &rec.grade)) {
      throw Error(ErrorCode::kParse,
                  where + ": grade must be one of F,D,C,B,A, got '" +
                      row.fields[c_grade] + "'");
    }
    if (!seen.insert(rec.student_id).second) {
      throw Error(ErrorCode::kParse,
                  where + ": duplicate student_id '" + rec.student_id + "'");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<GradeRecord> read_grades(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  }
  return parse_grades(in, path.string());
}

void write_grades(std::ostream& out, std::span<const GradeRecord> records) {
  out << "student_id,grade\n";
  for (const GradeRecord& r : records) {
    out << r.student_id << ',' << grade_letter(r.grade) << '\n';
  }
}

GradeScoring::GradeScoring(const std::array<std::size_t, 5>& counts,
                           double max_score)
    : counts_(counts), total_(0), max_score_(max_score), scores_{} {
  if (!(max_score > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "max_score must be positive");
  }
  for (std::size_t c : counts_) total_ += c;
  if (total_ == 0) {
    throw Error(ErrorCode::kEmptyInput, "grade scoring needs at least one student");
  }
  std::size_t cumulative = 0;
  for (std::size_t m = 0; m < 5; ++m) {
    cumulative += counts_[m];
    // The fraction is formed first so that G_5 is exactly max_score.
    scores_[m] = max_score_ * (static_cast<double>(cumulative) /
                               static_cast<double>(total_));
  }
}

GradeScoring GradeScoring::from_records(std::span<const GradeRecord> records,
                                        double max_score) {
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no grade records to score");
  }
  std::array<std::size_t, 5> counts{};
  for (const GradeRecord& r : records) ++counts[static_cast<int>(r.grade) - 1];
  return GradeScoring(counts, max_score);
}

std::map<std::string, double> score_grades(std::span<const GradeRecord> records,
                                           double max_score) {
  const GradeScoring scoring = GradeScoring::from_records(records, max_score);
  std::map<std::string, double> out;
  for (const GradeRecord& r : records) out[r.student_id] = scoring.score(r.grade);
  return out;
}

std::size_t AtRiskLabeling::at_risk_count() const {
  return static_cast<std::size_t>(
      std::count_if(labels.begin(), labels.end(),
                    [](const auto& kv) { return kv.second; }));
}

AtRiskLabeling label_at_risk(std::span<const GradeRecord> records,
                             std::size_t threshold_rank) {
  if (threshold_rank < 1) {
    throw Error(ErrorCode::kInvalidArgument, "threshold_rank must be >= 1");
  }
  if (records.empty()) {
    throw Error(ErrorCode::kEmptyInput, "no grade records to label");
  }
  std::vector<Grade> sorted;
  sorted.reserve(records.size());
  for (const GradeRecord& r : records) sorted.push_back(r.grade);
  std::sort(sorted.begin(), sorted.end());

  AtRiskLabeling result;
  result.threshold_rank = threshold_rank;
  if (threshold_rank > sorted.size()) {
    result.threshold_exceeds_cohort = true;
    result.boundary_grade = sorted.back();
  } else {
    result.boundary_grade = sorted[threshold_rank - 1];
  }
  for (const GradeRecord& r : records) {
    result.labels[r.student_id] = r.grade <= result.boundary_grade;
  }
  return result;
}

LectureSchedule parse_schedule(std::istream& in, std::string_view source) {
  const CsvTable table = parse_csv(in, source);
  const std::size_t c_index = table.column("lecture_index", source);
  const std::size_t c_end = table.column("window_end", source);
  if (table.rows.empty()) {
    throw Error(ErrorCode::kEmptyInput, std::string(source) + ": no lectures");
  }
  std::vector<std::pair<long, Timestamp>> rows;
  for (const CsvRow& row : table.rows) {
    const std::string where = std::string(source) + ":" + std::to_string(row.line);
    if (row.fields.size() != table.header.size()) {
      throw Error(ErrorCode::kParse, where + ": wrong number of fields");
    }
    long index = 0;
    try {
      std::size_t used = 0;
      index = std::stol(row.fields[c_index], &used);
      if (used != row.fields[c_index].size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
      throw Error(ErrorCode::kParse, where + ": bad lecture_index");
    }
    Timestamp end;
    if (!parse_rfc3339(row.fields[c_end], &end)) {
      throw Error(ErrorCode::kParse, where + ": malformed window_end '" +
                                         row.fields[c_end] + "'");
    }
    rows.emplace_back(index, end);
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  LectureSchedule schedule;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i > 0 && rows[i].first == rows[i - 1].first) {
      throw Error(ErrorCode::kParse, std::string(source) +
                                         ": duplicate lecture_index " +
                                         std::to_string(rows[i].first));
    }
    if (i > 0 && rows[i].second <= rows[i - 1].second) {
      throw Error(ErrorCode::kParse,
                  std::string(source) + ": window_end not strictly increasing "
                                        "at lecture_index " +
                      std::to_string(rows[i].first));
    }
    schedule.push_back(rows[i].second);
  }
  return schedule;
}

LectureSchedule read_schedule(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  }
  return parse_schedule(in, path.string());
}

void write_schedule(std::ostream& out, const LectureSchedule& schedule) {
  out << "lecture_index,window_end\n";
  for (std::size_t i = 0; i < schedule.size(); ++i) {
    out << (i + 1) << ',' << format_rfc3339(schedule[i]) << '\n';
  }
}

std::vector<EventRecord> truncate_events(std::span<const EventRecord> records,
                                         const LectureSchedule& schedule,
                                         std::size_t k) {
  if (k < 1 || k > schedule.size()) {
    throw Error(ErrorCode::kOutOfRange,
                "lecture k=" + std::to_string(k) + " outside 1.." +
                    std::to_string(schedule.size()));
  }
  for (std::size_t i = 1; i < schedule.size(); ++i) {
    if (schedule[i] <= schedule[i - 1]) {
      throw Error(ErrorCode::kInvalidArgument,
                  "schedule must be strictly increasing");
    }
  }
  const Timestamp cutoff = schedule[k - 1];
  std::vector<EventRecord> out;
  out.reserve(records.size());
  for (const EventRecord& r : records) {
    if (r.event_time <= cutoff) out.push_back(r);
  }
  return out;
}

std::vector<std::string> inactive_students(std::span<const EventRecord> events,
                                           std::span<const GradeRecord> grades) {
  std::set<std::string_view> active;
  for (const EventRecord& e : events) active.insert(e.student_id);
  std::vector<std::string> out;
  for (const GradeRecord& g : grades) {
    if (!active.contains(g.student_id)) out.push_back(g.student_id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<GradeRecord> ClientDataset::grade_records() const {
  std::vector<GradeRecord> out;
  out.reserve(students.size());
  for (std::size_t i = 0; i < students.size(); ++i) {
    out.push_back({students[i], grades[i]});
  }
  return out;
}

ClientDataset make_client(std::string client_id,
                          const std::map<std::string, Eigen::VectorXd>& features,
                          std::span<const GradeRecord> grades,
                          std::size_t lecture_count, double max_score) {
  if (grades.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "client '" + client_id + "' has no students");
  }
  if (features.empty()) {
    throw Error(ErrorCode::kEmptyInput,
                "client '" + client_id + "' has no feature vectors");
  }
  const Eigen::Index dim = features.begin()->second.size();
  std::vector<GradeRecord> sorted(grades.begin(), grades.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const GradeRecord& a, const GradeRecord& b) {
              return a.student_id < b.student_id;
            });
  const GradeScoring scoring = GradeScoring::from_records(sorted, max_score);

  ClientDataset client;
  client.client_id = std::move(client_id);
  client.lecture_count = lecture_count;
  client.features.resize(static_cast<Eigen::Index>(sorted.size()), dim);
  client.scored_grades.resize(static_cast<Eigen::Index>(sorted.size()));
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const GradeRecord& g = sorted[i];
    if (i > 0 && sorted[i - 1].student_id == g.student_id) {
      throw Error(ErrorCode::kInvalidArgument,
                  "client '" + client.client_id + "': duplicate student '" +
                      g.student_id + "'");
    }
    const auto it = features.find(g.student_id);
    if (it == features.end()) {
      throw Error(ErrorCode::kNotFound, "client '" + client.client_id +
                                            "': no features for student '" +
                                            g.student_id + "'");
    }
    if (it->second.size() != dim) {
      throw Error(ErrorCode::kLayoutMismatch,
                  "client '" + client.client_id + "': student '" +
                      g.student_id + "' has feature dimension " +
                      std::to_string(it->second.size()) + ", expected " +
                      std::to_string(dim));
    }
    const auto row = static_cast<Eigen::Index>(i);
    client.students.push_back(g.student_id);
    client.features.row(row) = it->second.transpose();
    client.scored_grades(row) = scoring.score(g.grade);
    client.grades.push_back(g.grade);
  }
  return client;
}

}  // namespace atrisk
