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
#ifndef ATRISK_PIPELINE_HPP_
#define ATRISK_PIPELINE_HPP_

#include <map>
#include <span>
#include <string>

#include "atrisk/diffpairs.hpp"
#include "atrisk/domain_data.hpp"
#include "atrisk/featurizer.hpp"
#include "atrisk/neuralnet.hpp"
#include "atrisk/ranking_eval.hpp"

namespace atrisk {

// p_ij = model(v_i - v_j) for every ordered pair of the client.
PairwiseScoreMatrix pairwise_scores(const ModelParams<double>& params,
                                    const ClientDataset& client);

// Individual prediction values: pairwise sums for a differential model,
// direct predictions otherwise.
std::map<std::string, double> predict_individual_scores(const ModelParams<double>& params,
                                                        const ClientDataset& client,
                                                        bool differential);

// Risk ranking of a client against its own ground truth.
RiskRanking rank_client(const std::map<std::string, double>& scores,
                        const ClientDataset& client,
                        std::size_t threshold_rank = kDefaultThresholdRank);

// Features from the client's logs up to lecture k (k = 0 means the whole
// schedule). Time buckets always span the full course so truncated and
// untruncated logs share one bucket layout. Graded students without events
// get zero vectors.
ClientDataset client_from_events(std::string client_id,
                                 std::span<const EventRecord> events,
                                 const LectureSchedule& schedule,
                                 std::span<const GradeRecord> grades,
                                 const FeatureSpec& spec, std::size_t k = 0,
                                 double max_score = kDefaultMaxScore);

}  // namespace atrisk

#endif  // ATRISK_PIPELINE_HPP_
