// Straightforward reference implementations of the ranking metrics, written
// independently of src/ranking_eval.cpp and used as test oracles.
#ifndef ATRISK_TESTS_METRIC_ORACLE_HPP_
#define ATRISK_TESTS_METRIC_ORACLE_HPP_

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

namespace atrisk::oracle {

struct Student {
  std::string id;
  double score;
  bool at_risk;
  double grade;
};

inline std::vector<Student> order(std::vector<Student> s) {
  // Selection sort on (score, id).
  for (std::size_t i = 0; i < s.size(); ++i) {
    std::size_t best = i;
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      if (s[j].score < s[best].score ||
          (s[j].score == s[best].score && s[j].id < s[best].id)) {
        best = j;
      }
    }
    std::swap(s[i], s[best]);
  }
  return s;
}

inline double precision_at(const std::vector<Student>& ranked, std::size_t n) {
  double hits = 0;
  for (std::size_t i = 0; i < n; ++i) hits += ranked[i].at_risk ? 1 : 0;
  return hits / static_cast<double>(n);
}

inline double ndcg(const std::vector<Student>& ranked) {
  std::vector<double> rel;
  for (const Student& s : ranked) rel.push_back(1.0 - s.grade);
  double dcg = 0;
  for (std::size_t i = 0; i < rel.size(); ++i) dcg += rel[i] / std::log2(i + 2.0);
  std::sort(rel.begin(), rel.end(), [](double a, double b) { return a > b; });
  double idcg = 0;
  for (std::size_t i = 0; i < rel.size(); ++i) idcg += rel[i] / std::log2(i + 2.0);
  return idcg == 0 ? 1.0 : dcg / idcg;
}

inline double pr_auc(const std::vector<Student>& ranked) {
  double positives = 0;
  for (const Student& s : ranked) positives += s.at_risk ? 1 : 0;
  double prev_r = 0, prev_p = ranked[0].at_risk ? 1.0 : 0.0;
  double area = 0, hits = 0;
  for (std::size_t n = 1; n <= ranked.size(); ++n) {
    hits += ranked[n - 1].at_risk ? 1 : 0;
    const double r = hits / positives;
    const double p = hits / static_cast<double>(n);
    area += (r - prev_r) * (p + prev_p) / 2;
    prev_r = r;
    prev_p = p;
  }
  return area;
}

}  // namespace atrisk::oracle

#endif  // ATRISK_TESTS_METRIC_ORACLE_HPP_
