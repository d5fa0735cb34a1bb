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
#ifndef ATRISK_FEATURIZER_HPP_
#define ATRISK_FEATURIZER_HPP_

#include <filesystem>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atrisk/domain_data.hpp"

namespace atrisk {

using FeatureMap = std::map<std::string, Eigen::VectorXd>;

// Per-student histogram of operation counts over equal time buckets of the
// course. Entry (op, bucket) lives at index op * n_buckets + bucket. Counts
// are left unnormalized so total activity volume stays in the vector; each
// event adds event_weight, a fixed unit shared by every student and course.
struct FeatureSpec {
  std::vector<std::string> vocab;
  std::size_t n_buckets = 4;
  double event_weight = 1.0;

  Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(vocab.size() * n_buckets);
  }
  // Canonical text of the spec; the hash is taken over it.
  std::string descriptor() const;
  std::string hash() const;
};

// Descriptor used for feature matrices supplied from outside.
std::string external_feature_descriptor(Eigen::Index dimension);

struct CourseSpan {
  Timestamp start;
  Timestamp end;
};

// [earliest event, last window end].
CourseSpan course_span(std::span<const EventRecord> events,
                       const LectureSchedule& schedule);

// Students listed in `roster` but without events receive zero vectors.
// Events whose operation is not in the vocabulary (including OTHER) are not
// counted. Throws kInvalidArgument for an empty vocabulary or an event
// outside the span.
FeatureMap featurize(std::span<const EventRecord> events, const FeatureSpec& spec,
                     const CourseSpan& span,
                     std::span<const std::string> roster = {});

// student_id,f_0,...,f_{D-1}
void write_feature_csv(std::ostream& out, const FeatureMap& features);
FeatureMap read_feature_csv(const std::filesystem::path& path);
FeatureMap parse_feature_csv(std::istream& in, std::string_view source);

}  // namespace atrisk

#endif  // ATRISK_FEATURIZER_HPP_
