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
#include "atrisk/pipeline.hpp"

namespace atrisk {

PairwiseScoreMatrix pairwise_scores(const ModelParams<double>& params,
                                    const ClientDataset& client) {
  const std::size_t n = client.size();
  PairwiseScoreMatrix matrix(client.students);
  if (n < 2) return matrix;
  const std::vector<PairSample> pairs = make_pairs(client);
  const SampleSet set = to_sample_set(pairs, client.dimension());
  const Eigen::VectorXd p = predict_batch(params, set.inputs);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    matrix.set(pairs[k].i, pairs[k].j, p(static_cast<Eigen::Index>(k)));
  }
  return matrix;
}

std::map<std::string, double> predict_individual_scores(const ModelParams<double>& params,
                                                        const ClientDataset& client,
                                                        bool differential) {
  if (client.dimension() != params.layout().input_dim) {
    throw Error(ErrorCode::kLayoutMismatch,
                "client '" + client.client_id + "' has feature dimension " +
                    std::to_string(client.dimension()) + ", model expects " +
                    std::to_string(params.layout().input_dim));
  }
  if (differential) {
    if (client.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "client '" + client.client_id +
                      "' needs at least 2 students for differential scoring");
    }
    return individual_scores(pairwise_scores(params, client), client.students);
  }
  const Eigen::VectorXd p = predict_batch(params, client.features);
  std::map<std::string, double> out;
  for (std::size_t i = 0; i < client.size(); ++i) {
    out[client.students[i]] = p(static_cast<Eigen::Index>(i));
  }
  return out;
}

RiskRanking rank_client(const std::map<std::string, double>& scores,
                        const ClientDataset& client, std::size_t threshold_rank) {
  const std::vector<GradeRecord> records = client.grade_records();
  const AtRiskLabeling labeling = label_at_risk(records, threshold_rank);
  std::map<std::string, double> grades;
  for (std::size_t i = 0; i < client.size(); ++i) {
    grades[client.students[i]] = client.scored_grades(static_cast<Eigen::Index>(i));
  }
  return make_ranking(scores, labeling.labels, grades);
}

ClientDataset client_from_events(std::string client_id,
                                 std::span<const EventRecord> events,
                                 const LectureSchedule& schedule,
                                 std::span<const GradeRecord> grades,
                                 const FeatureSpec& spec, std::size_t k,
                                 double max_score) {
  // Events after the last lecture window are outside the course.
  const std::vector<EventRecord> in_course =
      truncate_events(events, schedule, schedule.size());
  const CourseSpan span = course_span(in_course, schedule);
  const std::vector<EventRecord> kept =
      (k == 0 || k == schedule.size()) ? in_course
                                       : truncate_events(in_course, schedule, k);
  std::vector<std::string> roster;
  roster.reserve(grades.size());
  for (const GradeRecord& g : grades) roster.push_back(g.student_id);
  FeatureMap features = featurize(kept, spec, span, roster);
  return make_client(std::move(client_id), features, grades, schedule.size(), max_score);
}

}  // namespace atrisk
