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
#include "atrisk/featurizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include "atrisk/csv.hpp"

namespace atrisk {

std::string FeatureSpec::descriptor() const {
  std::string out = "histogram;vocab=";
  for (std::size_t i = 0; i < vocab.size(); ++i) {
    if (i) out += '|';
    out += vocab[i];
  }
  out += ";buckets=" + std::to_string(n_buckets);
  out += ";weight=" + format_double(event_weight);
  out += ";dim=" + std::to_string(dimension());
  return out;
}

std::string FeatureSpec::hash() const { return fnv1a_hex(descriptor()); }

std::string external_feature_descriptor(Eigen::Index dimension) {
  return "external;dim=" + std::to_string(dimension);
}

CourseSpan course_span(std::span<const EventRecord> events,
                       const LectureSchedule& schedule) {
  if (schedule.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty lecture schedule");
  }
  Timestamp start = schedule.front();
  for (const EventRecord& e : events) start = std::min(start, e.event_time);
  return {start, schedule.back()};
}

FeatureMap featurize(std::span<const EventRecord> events, const FeatureSpec& spec,
                     const CourseSpan& span, std::span<const std::string> roster) {
  if (spec.vocab.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "feature vocabulary is empty");
  }
  if (spec.n_buckets < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_buckets must be >= 1");
  }
  if (!(spec.event_weight > 0.0) || !std::isfinite(spec.event_weight)) {
    throw Error(ErrorCode::kInvalidArgument, "event_weight must be positive and finite");
  }
  if (span.end < span.start) {
    throw Error(ErrorCode::kInvalidArgument, "course span ends before it starts");
  }
  std::map<std::string, std::size_t, std::less<>> op_index;
  for (std::size_t i = 0; i < spec.vocab.size(); ++i) op_index[spec.vocab[i]] = i;

  const Eigen::Index dim = spec.dimension();
  const auto nb = static_cast<long long>(spec.n_buckets);
  const long long length = (span.end - span.start).count();

  FeatureMap out;
  for (const std::string& id : roster) out.emplace(id, Eigen::VectorXd::Zero(dim));
  for (const EventRecord& e : events) {
    if (e.event_time < span.start || e.event_time > span.end) {
      throw Error(ErrorCode::kInvalidArgument,
                  "event of '" + e.student_id + "' at " +
                      format_rfc3339(e.event_time) + " lies outside the course span");
    }
    auto [it, inserted] = out.try_emplace(e.student_id);
    if (inserted) it->second = Eigen::VectorXd::Zero(dim);
    const auto op = op_index.find(e.operation);
    if (op == op_index.end()) continue;
    long long bucket = 0;
    if (length > 0) {
      bucket = (e.event_time - span.start).count() * nb / length;
      bucket = std::min(bucket, nb - 1);
    }
    it->second(static_cast<Eigen::Index>(op->second * spec.n_buckets) + bucket) += spec.event_weight;
  }
  return out;
}

void write_feature_csv(std::ostream& out, const FeatureMap& features) {
  const Eigen::Index dim = features.empty() ? 0 : features.begin()->second.size();
  out << "student_id";
  for (Eigen::Index j = 0; j < dim; ++j) out << ",f_" << j;
  out << '\n';
  for (const auto& [id, v] : features) {
    out << id;
    for (Eigen::Index j = 0; j < v.size(); ++j) out << ',' << format_double(v(j));
    out << '\n';
  }
}

FeatureMap parse_feature_csv(std::istream& in, std::string_view source) {
  const CsvTable table = parse_csv(in, source);
  if (table.header.size() < 2 || table.header[0] != "student_id") {
    throw Error(ErrorCode::kParse,
                std::string(source) + ": expected header 'student_id,f_0,...'");
  }
  if (table.rows.empty()) {
    throw Error(ErrorCode::kEmptyInput, std::string(source) + ": no feature rows");
  }
  const auto dim = static_cast<Eigen::Index>(table.header.size() - 1);
  FeatureMap out;
  for (const CsvRow& row : table.rows) {
    const std::string where = std::string(source) + ":" + std::to_string(row.line);
    if (row.fields.size() != table.header.size()) {
      throw Error(ErrorCode::kParse, where + ": wrong number of fields");
    }
    Eigen::VectorXd v(dim);
    for (Eigen::Index j = 0; j < dim; ++j) {
      const std::string& f = row.fields[static_cast<std::size_t>(j) + 1];
      double value = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), value);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() ||
          !std::isfinite(value)) {
        throw Error(ErrorCode::kParse, where + ": bad feature value '" + f + "'");
      }
      v(j) = value;
    }
    if (!out.emplace(row.fields[0], std::move(v)).second) {
      throw Error(ErrorCode::kParse,
                  where + ": duplicate student_id '" + row.fields[0] + "'");
    }
  }
  return out;
}

FeatureMap read_feature_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kNotFound, "cannot open '" + path.string() + "'");
  }
  return parse_feature_csv(in, path.string());
}

}  // namespace atrisk
