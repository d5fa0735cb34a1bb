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
#ifndef ATRISK_DIFFPAIRS_HPP_
#define ATRISK_DIFFPAIRS_HPP_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atrisk/domain_data.hpp"

namespace atrisk {

// Differential sample for the ordered pair (i, j) of one client:
// d = v_i - v_j, e = g_i - g_j. i and j index ClientDataset::students.
struct PairSample {
  std::size_t i = 0;
  std::size_t j = 0;
  Eigen::VectorXd d;
  double e = 0.0;
};

// All n(n-1) ordered pairs in (i, j) lexicographic order. Throws for n < 2.
std::vector<PairSample> make_pairs(const ClientDataset& client);

// `max_pairs` ordered pairs drawn uniformly without replacement, returned in
// (i, j) order and reproducible for a given seed. Equals make_pairs when the
// cap is not binding. Throws when max_pairs < n.
std::vector<PairSample> pair_cap(const ClientDataset& client,
                                 std::size_t max_pairs, std::uint64_t seed);

// Dense training matrix: one row per sample.
struct SampleSet {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;

  Eigen::Index size() const { return inputs.rows(); }
};

SampleSet to_sample_set(std::span<const PairSample> pairs, Eigen::Index dimension);

// (v_i, g_i) per student, for training without differential features.
SampleSet direct_samples(const ClientDataset& client);

// p_ij for every ordered pair of one client's students. Unset entries are
// missing; the diagonal is never read.
class PairwiseScoreMatrix {
 public:
  explicit PairwiseScoreMatrix(std::vector<std::string> students);

  const std::vector<std::string>& students() const { return students_; }
  std::size_t size() const { return students_.size(); }

  void set(std::size_t i, std::size_t j, double score);
  void set(const std::string& i, const std::string& j, double score);
  bool has(std::size_t i, std::size_t j) const;
  double at(std::size_t i, std::size_t j) const;
  std::size_t index_of(const std::string& id) const;

 private:
  std::vector<std::string> students_;
  std::map<std::string, std::size_t> index_;
  Eigen::MatrixXd scores_;  // NaN marks a missing entry
};

// q_i = sum over j != i of p_ij, summed in ascending j. Throws kNotFound
// naming the first missing (i, j).
std::map<std::string, double> individual_scores(const PairwiseScoreMatrix& scores,
                                                std::span<const std::string> students);

}  // namespace atrisk

#endif  // ATRISK_DIFFPAIRS_HPP_
