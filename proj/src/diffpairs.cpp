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
#include "atrisk/diffpairs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

namespace atrisk {

namespace {

PairSample make_sample(const ClientDataset& client, std::size_t i, std::size_t j) {
  const auto ri = static_cast<Eigen::Index>(i);
  const auto rj = static_cast<Eigen::Index>(j);
  return {i, j, (client.features.row(ri) - client.features.row(rj)).transpose(),
          client.scored_grades(ri) - client.scored_grades(rj)};
}

void require_pairable(const ClientDataset& client) {
  if (client.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument,
                "client '" + client.client_id + "' has " +
                    std::to_string(client.size()) +
                    " student(s); differential pairs need at least 2");
  }
}

}  // namespace

std::vector<PairSample> make_pairs(const ClientDataset& client) {
  require_pairable(client);
  const std::size_t n = client.size();
  std::vector<PairSample> pairs;
  pairs.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) pairs.push_back(make_sample(client, i, j));
    }
  }
  return pairs;
}

std::vector<PairSample> pair_cap(const ClientDataset& client,
                                 std::size_t max_pairs, std::uint64_t seed) {
  require_pairable(client);
  const std::size_t n = client.size();
  if (max_pairs < n) {
    throw Error(ErrorCode::kInvalidArgument,
                "max_pairs=" + std::to_string(max_pairs) +
                    " is below the student count " + std::to_string(n));
  }
  const std::size_t total = n * (n - 1);
  if (total <= max_pairs) return make_pairs(client);

  // Floyd's algorithm: max_pairs distinct codes from [0, total).
  std::mt19937_64 rng(seed);
  std::unordered_set<std::size_t> chosen;
  chosen.reserve(max_pairs * 2);
  std::vector<std::size_t> codes;
  codes.reserve(max_pairs);
  for (std::size_t r = total - max_pairs; r < total; ++r) {
    std::uniform_int_distribution<std::size_t> pick(0, r);
    std::size_t c = pick(rng);
    if (!chosen.insert(c).second) {
      c = r;
      chosen.insert(c);
    }
    codes.push_back(c);
  }
  std::sort(codes.begin(), codes.end());

  std::vector<PairSample> pairs;
  pairs.reserve(max_pairs);
  for (const std::size_t code : codes) {
    // Code c enumerates (i, j != i) row by row: row i holds n-1 entries.
    const std::size_t i = code / (n - 1);
    std::size_t j = code % (n - 1);
    if (j >= i) ++j;
    pairs.push_back(make_sample(client, i, j));
  }
  return pairs;
}

SampleSet to_sample_set(std::span<const PairSample> pairs, Eigen::Index dimension) {
  SampleSet set;
  set.inputs.resize(static_cast<Eigen::Index>(pairs.size()), dimension);
  set.targets.resize(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(k);
    set.inputs.row(r) = pairs[k].d.transpose();
    set.targets(r) = pairs[k].e;
  }
  return set;
}

SampleSet direct_samples(const ClientDataset& client) {
  return {client.features, client.scored_grades};
}

PairwiseScoreMatrix::PairwiseScoreMatrix(std::vector<std::string> students)
    : students_(std::move(students)) {
  const auto n = static_cast<Eigen::Index>(students_.size());
  scores_ = Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < students_.size(); ++i) {
    if (!index_.emplace(students_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate student '" + students_[i] + "' in score matrix");
    }
  }
}

std::size_t PairwiseScoreMatrix::index_of(const std::string& id) const {
  const auto it = index_.find(id);
  if (it == index_.end()) {
    throw Error(ErrorCode::kNotFound, "student '" + id + "' not in score matrix");
  }
  return it->second;
}

void PairwiseScoreMatrix::set(std::size_t i, std::size_t j, double score) {
  if (i >= size() || j >= size() || i == j) {
    throw Error(ErrorCode::kOutOfRange, "invalid pair index (" +
                                            std::to_string(i) + ", " +
                                            std::to_string(j) + ")");
  }
  scores_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = score;
}

void PairwiseScoreMatrix::set(const std::string& i, const std::string& j,
                              double score) {
  set(index_of(i), index_of(j), score);
}

bool PairwiseScoreMatrix::has(std::size_t i, std::size_t j) const {
  return i < size() && j < size() && i != j &&
         !std::isnan(scores_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
}

double PairwiseScoreMatrix::at(std::size_t i, std::size_t j) const {
  if (!has(i, j)) {
    throw Error(ErrorCode::kNotFound, "missing pairwise score for (" +
                                          (i < size() ? students_[i] : "?") + ", " +
                                          (j < size() ? students_[j] : "?") + ")");
  }
  return scores_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
}

std::map<std::string, double> individual_scores(const PairwiseScoreMatrix& scores,
                                                std::span<const std::string> students) {
  std::vector<std::size_t> idx;
  idx.reserve(students.size());
  for (const std::string& s : students) idx.push_back(scores.index_of(s));
  std::vector<std::size_t> order = idx;
  std::sort(order.begin(), order.end());

  std::map<std::string, double> out;
  for (std::size_t a = 0; a < idx.size(); ++a) {
    double q = 0.0;
    for (const std::size_t j : order) {
      if (j == idx[a]) continue;
      q += scores.at(idx[a], j);
    }
    out[students[a]] = q;
  }
  return out;
}

}  // namespace atrisk
