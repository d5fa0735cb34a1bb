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
#ifndef ATRISK_DOMAIN_DATA_HPP_
#define ATRISK_DOMAIN_DATA_HPP_

#include <array>
#include <filesystem>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "atrisk/common.hpp"

namespace atrisk {

// Catch-all bucket for operations outside the configured vocabulary.
inline constexpr std::string_view kOtherOperation = "OTHER";

inline constexpr double kDefaultMaxScore = 0.95;
inline constexpr std::size_t kDefaultThresholdRank = 15;

struct OperationVocab {
  std::vector<std::string> names;

  bool contains(std::string_view op) const;

  // Reading-platform operations commonly found in e-book logs.
  static OperationVocab standard();
};

struct EventRecord {
  std::string student_id;
  std::string material_id;
  std::string operation;  // a vocabulary entry or kOtherOperation
  Timestamp event_time;

  friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

struct EventLog {
  std::vector<EventRecord> records;  // sorted by (student_id, event_time)
  std::size_t unknown_operation_count = 0;
  std::map<std::string, std::size_t> unknown_operations;
};

// Reads an events CSV (student_id, material_id, operation, event_time).
// Malformed timestamps raise kParse naming the line; a file without data
// rows raises kEmptyInput.
EventLog ingest_events(const std::filesystem::path& path,
                       const OperationVocab& vocab);
EventLog parse_events(std::istream& in, const OperationVocab& vocab,
                      std::string_view source);
void write_events(std::ostream& out, std::span<const EventRecord> records);

// Stable (student_id, event_time) order.
void sort_events(std::vector<EventRecord>& records);

// Five-level letter grade, F = 1 ... A = 5.
enum class Grade : int { kF = 1, kD = 2, kC = 3, kB = 4, kA = 5 };

bool parse_grade(std::string_view text, Grade* out);
char grade_letter(Grade g);

struct GradeRecord {
  std::string student_id;
  Grade grade;

  friend bool operator==(const GradeRecord&, const GradeRecord&) = default;
};

std::vector<GradeRecord> read_grades(const std::filesystem::path& path);
std::vector<GradeRecord> parse_grades(std::istream& in, std::string_view source);
void write_grades(std::ostream& out, std::span<const GradeRecord> records);

// Converts letter grades to regression targets using the cohort's own
// cumulative grade distribution:
//   G_m = max_score * (x_1 + ... + x_m) / X
class GradeScoring {
 public:
  GradeScoring(const std::array<std::size_t, 5>& counts, double max_score);
  static GradeScoring from_records(std::span<const GradeRecord> records,
                                   double max_score = kDefaultMaxScore);

  double score(Grade g) const { return scores_[static_cast<int>(g) - 1]; }
  const std::array<std::size_t, 5>& counts() const { return counts_; }
  std::size_t total() const { return total_; }
  double max_score() const { return max_score_; }

 private:
  std::array<std::size_t, 5> counts_;  // indexed F..A
  std::size_t total_;
  double max_score_;
  std::array<double, 5> scores_;
};

std::map<std::string, double> score_grades(std::span<const GradeRecord> records,
                                           double max_score = kDefaultMaxScore);

struct AtRiskLabeling {
  std::size_t threshold_rank = kDefaultThresholdRank;
  Grade boundary_grade = Grade::kF;
  std::map<std::string, bool> labels;
  // Set when the cohort is smaller than threshold_rank; everyone is labeled.
  bool threshold_exceeds_cohort = false;

  std::size_t at_risk_count() const;
};

// Students whose grade is <= the grade of the student at position
// threshold_rank from the bottom. Ties at the boundary are all included.
AtRiskLabeling label_at_risk(std::span<const GradeRecord> records,
                             std::size_t threshold_rank = kDefaultThresholdRank);

// End of each lecture window, strictly increasing.
using LectureSchedule = std::vector<Timestamp>;

LectureSchedule read_schedule(const std::filesystem::path& path);
LectureSchedule parse_schedule(std::istream& in, std::string_view source);
void write_schedule(std::ostream& out, const LectureSchedule& schedule);

// Keeps events with event_time <= end of window k (1-based).
std::vector<EventRecord> truncate_events(std::span<const EventRecord> records,
                                         const LectureSchedule& schedule,
                                         std::size_t k);

// Students present in `grades` with no events at all.
std::vector<std::string> inactive_students(std::span<const EventRecord> events,
                                           std::span<const GradeRecord> grades);

// One course's students: the unit of federation. Row r of `features` and
// entry r of `scored_grades` / `grades` belong to students[r].
struct ClientDataset {
  std::string client_id;
  std::vector<std::string> students;
  Eigen::MatrixXd features;
  Eigen::VectorXd scored_grades;
  std::vector<Grade> grades;
  std::size_t lecture_count = 1;

  std::size_t size() const { return students.size(); }
  Eigen::Index dimension() const { return features.cols(); }
  std::vector<GradeRecord> grade_records() const;
};

// Assembles a client from per-student features and grades, scoring grades
// against this client's own distribution. Students are ordered by id. Every
// graded student must have a feature vector of dimension `dimension`.
ClientDataset make_client(std::string client_id,
                          const std::map<std::string, Eigen::VectorXd>& features,
                          std::span<const GradeRecord> grades,
                          std::size_t lecture_count,
                          double max_score = kDefaultMaxScore);

}  // namespace atrisk

#endif  // ATRISK_DOMAIN_DATA_HPP_
