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
#ifndef ATRISK_RANKING_EVAL_HPP_
#define ATRISK_RANKING_EVAL_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace atrisk {

struct RankedStudent {
  std::string student_id;
  double score = 0.0;    // predicted q_i; lower means higher risk
  bool at_risk = false;  // ground truth
  double grade = 0.0;    // scored grade G_m, ground truth
};

// Students in risk order: ascending score, ties by ascending student_id.
struct RiskRanking {
  std::vector<RankedStudent> entries;

  std::size_t size() const { return entries.size(); }
  std::size_t at_risk_count() const;
};

// Throws kInvalidArgument when the three maps do not share one key set
// (listing the difference) or are empty.
RiskRanking make_ranking(const std::map<std::string, double>& scores,
                         const std::map<std::string, bool>& labels,
                         const std::map<std::string, double>& grades);

// Fraction of at-risk students among the first n. Requires 1 <= n <= size.
double top_n_precision(const RiskRanking& ranking, std::size_t n);

// nDCG over the full ranking with relevance 1 - grade and discount
// 1 / log2(position + 1). An all-zero relevance vector yields 1.0 and sets
// *degenerate.
double ndcg(const RiskRanking& ranking, bool* degenerate = nullptr);

struct PrPoint {
  std::size_t n = 0;
  double recall = 0.0;
  double precision = 0.0;
};

// (recall, precision) of the top-n cut for n = 1..N.
std::vector<PrPoint> pr_curve(const RiskRanking& ranking);

// Area under the top-n precision/recall polyline by the trapezoid rule,
// starting from (0, precision_1). Throws when nobody is at risk.
double pr_auc(const RiskRanking& ranking);

inline constexpr std::array<std::size_t, 3> kTopNCutoffs = {5, 10, 15};

struct MetricsReport {
  std::array<double, 3> top_n{};  // at kTopNCutoffs
  double top_at_risk = 0.0;       // n = number of at-risk students
  double ndcg = 0.0;
  double pr_auc = 0.0;
  std::size_t at_risk_count = 0;
  std::size_t student_count = 0;
  std::vector<std::string> warnings;
};

// Cutoffs larger than the cohort are evaluated at n = N with a warning.
MetricsReport evaluate(const RiskRanking& ranking);

// Per-metric arithmetic mean; counts are taken from the first report.
MetricsReport mean_report(std::span<const MetricsReport> reports);

// Mean metrics over `shuffles` uniformly random orderings of the ranking.
MetricsReport random_baseline(const RiskRanking& ranking, std::size_t shuffles,
                              std::uint64_t seed);

// CSV columns shared by every metric table this project writes.
std::string metrics_csv_columns();
std::string metrics_csv_values(const MetricsReport& report);

void write_pr_curve_csv(std::ostream& out, const RiskRanking& ranking);

}  // namespace atrisk

#endif  // ATRISK_RANKING_EVAL_HPP_
