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
#include "atrisk/ranking_eval.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "atrisk/common.hpp"

namespace atrisk {

std::size_t RiskRanking::at_risk_count() const {
  return static_cast<std::size_t>(std::count_if(
      entries.begin(), entries.end(), [](const RankedStudent& s) { return s.at_risk; }));
}

RiskRanking make_ranking(const std::map<std::string, double>& scores,
                         const std::map<std::string, bool>& labels,
                         const std::map<std::string, double>& grades) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cannot rank an empty score map");
  }
  std::string diff;
  auto report_missing = [&diff](const auto& have, const auto& want, std::string_view name) {
    for (const auto& kv : want) {
      if (!have.contains(kv.first)) diff += " " + kv.first + " (no " + std::string(name) + ")";
    }
  };
  report_missing(labels, scores, "label");
  report_missing(grades, scores, "grade");
  report_missing(scores, labels, "score");
  report_missing(scores, grades, "score");
  if (!diff.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "ranking inputs disagree:" + diff);
  }

  RiskRanking ranking;
  ranking.entries.reserve(scores.size());
  for (const auto& [id, score] : scores) {
    ranking.entries.push_back({id, score, labels.at(id), grades.at(id)});
  }
  // std::map iteration already orders ids, so a stable sort on score alone
  // gives the (score, student_id) order.
  std::stable_sort(ranking.entries.begin(), ranking.entries.end(),
                   [](const RankedStudent& a, const RankedStudent& b) {
                     return a.score < b.score;
                   });
  return ranking;
}

double top_n_precision(const RiskRanking& ranking, std::size_t n) {
  if (n < 1 || n > ranking.size()) {
    throw Error(ErrorCode::kOutOfRange, "top-n cutoff " + std::to_string(n) +
                                            " outside 1.." +
                                            std::to_string(ranking.size()));
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += ranking.entries[i].at_risk ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(n);
}

double ndcg(const RiskRanking& ranking, bool* degenerate) {
  if (degenerate) *degenerate = false;
  if (ranking.size() == 0) {
    throw Error(ErrorCode::kInvalidArgument, "nDCG of an empty ranking");
  }
  std::vector<double> relevance;
  relevance.reserve(ranking.size());
  for (const RankedStudent& s : ranking.entries) relevance.push_back(1.0 - s.grade);

  auto dcg_of = [](const std::vector<double>& rel) {
    double dcg = 0.0;
    for (std::size_t i = 0; i < rel.size(); ++i) {
      dcg += rel[i] / std::log2(static_cast<double>(i) + 2.0);
    }
    return dcg;
  };
  const double dcg = dcg_of(relevance);
  std::vector<double> ideal = relevance;
  std::sort(ideal.begin(), ideal.end(), std::greater<>());
  const double idcg = dcg_of(ideal);
  if (idcg == 0.0) {
    if (degenerate) *degenerate = true;
    return 1.0;
  }
  if (dcg == idcg) return 1.0;
  return dcg / idcg;
}

std::vector<PrPoint> pr_curve(const RiskRanking& ranking) {
  const std::size_t positives = ranking.at_risk_count();
  if (positives == 0) {
    throw Error(ErrorCode::kInvalidArgument,
                "precision-recall needs at least one at-risk student");
  }
  std::vector<PrPoint> points;
  points.reserve(ranking.size());
  std::size_t hits = 0;
  for (std::size_t n = 1; n <= ranking.size(); ++n) {
    hits += ranking.entries[n - 1].at_risk ? 1 : 0;
    points.push_back({n, static_cast<double>(hits) / static_cast<double>(positives),
                      static_cast<double>(hits) / static_cast<double>(n)});
  }
  return points;
}

double pr_auc(const RiskRanking& ranking) {
  const std::vector<PrPoint> points = pr_curve(ranking);
  // Recall is non-decreasing in n, so the sweep is already sorted by recall;
  // segments with equal recall have zero width.
  double area = 0.0;
  double prev_recall = 0.0;
  double prev_precision = points.front().precision;
  for (const PrPoint& p : points) {
    area += (p.recall - prev_recall) * (p.precision + prev_precision) / 2.0;
    prev_recall = p.recall;
    prev_precision = p.precision;
  }
  return area;
}

MetricsReport evaluate(const RiskRanking& ranking) {
  MetricsReport report;
  report.student_count = ranking.size();
  report.at_risk_count = ranking.at_risk_count();
  for (std::size_t i = 0; i < kTopNCutoffs.size(); ++i) {
    const std::size_t n = std::min(kTopNCutoffs[i], ranking.size());
    if (n < kTopNCutoffs[i]) {
      report.warnings.push_back("top" + std::to_string(kTopNCutoffs[i]) + " computed at n=" +
                                std::to_string(n) + " (cohort size)");
    }
    report.top_n[i] = top_n_precision(ranking, n);
  }
  report.top_at_risk = top_n_precision(ranking, report.at_risk_count);
  bool degenerate = false;
  report.ndcg = ndcg(ranking, &degenerate);
  if (degenerate) {
    report.warnings.push_back("all relevances are zero; nDCG defined as 1.0");
  }
  report.pr_auc = pr_auc(ranking);
  return report;
}

MetricsReport mean_report(std::span<const MetricsReport> reports) {
  if (reports.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "no metric reports to average");
  }
  MetricsReport mean;
  mean.at_risk_count = reports.front().at_risk_count;
  mean.student_count = reports.front().student_count;
  for (const MetricsReport& r : reports) {
    for (std::size_t i = 0; i < mean.top_n.size(); ++i) mean.top_n[i] += r.top_n[i];
    mean.top_at_risk += r.top_at_risk;
    mean.ndcg += r.ndcg;
    mean.pr_auc += r.pr_auc;
    for (const std::string& w : r.warnings) {
      if (std::find(mean.warnings.begin(), mean.warnings.end(), w) == mean.warnings.end()) {
        mean.warnings.push_back(w);
      }
    }
  }
  const auto k = static_cast<double>(reports.size());
  for (double& v : mean.top_n) v /= k;
  mean.top_at_risk /= k;
  mean.ndcg /= k;
  mean.pr_auc /= k;
  return mean;
}

MetricsReport random_baseline(const RiskRanking& ranking, std::size_t shuffles,
                              std::uint64_t seed) {
  if (shuffles == 0) {
    throw Error(ErrorCode::kInvalidArgument, "random baseline needs >= 1 shuffle");
  }
  std::mt19937_64 rng(seed);
  RiskRanking shuffled = ranking;
  std::vector<MetricsReport> reports;
  reports.reserve(shuffles);
  for (std::size_t s = 0; s < shuffles; ++s) {
    std::shuffle(shuffled.entries.begin(), shuffled.entries.end(), rng);
    reports.push_back(evaluate(shuffled));
  }
  return mean_report(reports);
}

std::string metrics_csv_columns() {
  return "top5,top10,top15,top_at_risk,ndcg,pr_auc,at_risk,students";
}

std::string metrics_csv_values(const MetricsReport& r) {
  std::string out;
  for (double v : r.top_n) out += format_double(v) + ",";
  out += format_double(r.top_at_risk) + "," + format_double(r.ndcg) + "," +
         format_double(r.pr_auc) + "," + std::to_string(r.at_risk_count) + "," +
         std::to_string(r.student_count);
  return out;
}

void write_pr_curve_csv(std::ostream& out, const RiskRanking& ranking) {
  out << "n,recall,precision\n";
  for (const PrPoint& p : pr_curve(ranking)) {
    out << p.n << ',' << format_double(p.recall) << ',' << format_double(p.precision)
        << '\n';
  }
}

}  // namespace atrisk
