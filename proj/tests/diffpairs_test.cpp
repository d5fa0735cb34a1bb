#include "atrisk/diffpairs.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "doctest.h"

namespace atrisk {
namespace {

ClientDataset random_client(std::mt19937_64& rng, std::size_t n, Eigen::Index dim) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> grade(0.0, 0.95);
  ClientDataset c;
  c.client_id = "R";
  c.features.resize(static_cast<Eigen::Index>(n), dim);
  c.scored_grades.resize(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    c.students.push_back("s" + std::to_string(100 + i));
    c.grades.push_back(Grade::kC);
    for (Eigen::Index j = 0; j < dim; ++j) c.features(static_cast<Eigen::Index>(i), j) = normal(rng);
    c.scored_grades(static_cast<Eigen::Index>(i)) = grade(rng);
  }
  return c;
}

TEST_CASE("make_pairs cardinality and antisymmetry") {
  std::mt19937_64 rng(1);
  const ClientDataset c = random_client(rng, 5, 3);
  const auto pairs = make_pairs(c);
  CHECK(pairs.size() == 20);
  for (const PairSample& p : pairs) {
    CHECK(p.i != p.j);
    const auto twin = std::find_if(pairs.begin(), pairs.end(), [&](const PairSample& q) {
      return q.i == p.j && q.j == p.i;
    });
    REQUIRE(twin != pairs.end());
    CHECK(twin->d == -p.d);
    CHECK(twin->e == -p.e);
    CHECK(p.d == (c.features.row(static_cast<Eigen::Index>(p.i)) -
                  c.features.row(static_cast<Eigen::Index>(p.j))).transpose());
  }
}

TEST_CASE("identical students give zero differences") {
  ClientDataset c;
  c.client_id = "T";
  c.students = {"a", "b"};
  c.grades = {Grade::kB, Grade::kB};
  c.features = Eigen::MatrixXd::Constant(2, 4, 1.5);
  c.scored_grades = Eigen::VectorXd::Constant(2, 0.5);
  for (const PairSample& p : make_pairs(c)) {
    CHECK(p.d.isZero(0.0));
    CHECK(p.e == 0.0);
  }
}

TEST_CASE("fewer than two students cannot be paired") {
  std::mt19937_64 rng(2);
  CHECK_THROWS_AS(make_pairs(random_client(rng, 1, 2)), Error);
}

TEST_CASE("pair_cap sampling") {
  std::mt19937_64 rng(4);
  const ClientDataset small = random_client(rng, 5, 2);
  const auto all = make_pairs(small);
  const auto capped = pair_cap(small, 100, 7);
  REQUIRE(capped.size() == all.size());
  for (std::size_t k = 0; k < all.size(); ++k) {
    CHECK(capped[k].i == all[k].i);
    CHECK(capped[k].j == all[k].j);
  }

  const ClientDataset big = random_client(rng, 50, 2);
  const auto a = pair_cap(big, 500, 42);
  const auto b = pair_cap(big, 500, 42);
  REQUIRE(a.size() == 500);
  std::set<std::pair<std::size_t, std::size_t>> distinct;
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].i == b[k].i);
    CHECK(a[k].j == b[k].j);
    CHECK(a[k].i != a[k].j);
    distinct.insert({a[k].i, a[k].j});
  }
  CHECK(distinct.size() == 500);
  const auto other = pair_cap(big, 500, 43);
  bool differs = false;
  for (std::size_t k = 0; k < other.size(); ++k) {
    differs |= other[k].i != a[k].i || other[k].j != a[k].j;
  }
  CHECK(differs);
  CHECK_THROWS_AS(pair_cap(big, 10, 42), Error);
}

TEST_CASE("individual score sums") {
  PairwiseScoreMatrix m({"1", "2", "3", "4", "5"});
  const double row1[] = {0.2, 0.1, -0.3, 0.4};
  for (std::size_t j = 1; j < 5; ++j) m.set(0, j, row1[j - 1]);
  for (std::size_t i = 1; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (i != j) m.set(i, j, 0.0);
    }
  }
  const auto q = individual_scores(m, m.students());
  CHECK(q.at("1") == doctest::Approx(0.4).epsilon(1e-15));
  CHECK(q.at("2") == 0.0);

  PairwiseScoreMatrix zeros({"a", "b", "c"});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) zeros.set(i, j, 0.0);
    }
  }
  for (const auto& [id, v] : individual_scores(zeros, zeros.students())) CHECK(v == 0.0);
}

TEST_CASE("missing pair entries are named") {
  PairwiseScoreMatrix m({"a", "b", "c"});
  m.set("a", "b", 1.0);
  m.set("b", "a", 1.0);
  try {
    individual_scores(m, m.students());
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("(a, c)") != std::string::npos);
  }
}

PairwiseScoreMatrix oracle_scores(const ClientDataset& c, double shift = 0.0) {
  PairwiseScoreMatrix m(c.students);
  for (const PairSample& p : make_pairs(c)) m.set(p.i, p.j, p.e + shift);
  return m;
}

std::vector<std::size_t> argsort(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  return idx;
}

TEST_CASE("ground-truth pair scores recover the grade ranking") {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<std::size_t> size(2, 8);
  for (int trial = 0; trial < 200; ++trial) {
    const ClientDataset c = random_client(rng, size(rng), 2);
    const std::size_t n = c.size();
    const auto q = individual_scores(oracle_scores(c), c.students);
    std::vector<double> qv, gv;
    double g_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) g_sum += c.scored_grades(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < n; ++i) {
      const double g = c.scored_grades(static_cast<Eigen::Index>(i));
      qv.push_back(q.at(c.students[i]));
      gv.push_back(g);
      CHECK(qv.back() == doctest::Approx(static_cast<double>(n) * g - g_sum).epsilon(1e-12));
    }
    CHECK(argsort(qv) == argsort(gv));

    // A constant added to every p_ij shifts q by (n-1)c and keeps the order.
    const double shift = 0.37;
    const auto qs = individual_scores(oracle_scores(c, shift), c.students);
    std::vector<double> qsv;
    for (std::size_t i = 0; i < n; ++i) {
      qsv.push_back(qs.at(c.students[i]));
      CHECK(qsv.back() ==
            doctest::Approx(qv[i] + static_cast<double>(n - 1) * shift).epsilon(1e-12));
    }
    CHECK(argsort(qsv) == argsort(qv));
  }
}

TEST_CASE("sample sets") {
  std::mt19937_64 rng(12);
  const ClientDataset c = random_client(rng, 4, 3);
  const auto pairs = make_pairs(c);
  const SampleSet s = to_sample_set(pairs, 3);
  CHECK(s.size() == 12);
  CHECK(s.inputs.row(5).transpose() == pairs[5].d);
  CHECK(s.targets(5) == pairs[5].e);
  const SampleSet direct = direct_samples(c);
  CHECK(direct.size() == 4);
  CHECK(direct.targets == c.scored_grades);
}

}  // namespace
}  // namespace atrisk
