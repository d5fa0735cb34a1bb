#include "atrisk/synthgen.hpp"

#include <chrono>
#include <numeric>
#include <random>

#include "doctest.h"

namespace atrisk {
namespace {

double max_mean_distance(const std::vector<ClientDataset>& clients) {
  double worst = 0.0;
  for (std::size_t a = 0; a < clients.size(); ++a) {
    for (std::size_t b = a + 1; b < clients.size(); ++b) {
      const Eigen::VectorXd ma = clients[a].features.colwise().mean();
      const Eigen::VectorXd mb = clients[b].features.colwise().mean();
      worst = std::max(worst, (ma - mb).norm());
    }
  }
  return worst;
}

TEST_CASE("noiseless features grow with grade") {
  SynthSpec spec;
  spec.n_clients = 3;
  spec.client_sizes = {30, 40, 50};
  spec.feature_dim = 12;
  spec.noise_std = 0.0;
  spec.seed = 2;
  for (const ClientDataset& c : generate(spec)) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      for (std::size_t j = 0; j < c.size(); ++j) {
        if (c.grades[i] < c.grades[j]) {
          CHECK(c.features.row(static_cast<Eigen::Index>(i)).norm() <
                c.features.row(static_cast<Eigen::Index>(j)).norm());
        }
      }
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  SynthSpec spec;
  spec.n_clients = 4;
  spec.feature_dim = 8;
  spec.client_shift = 0.7;
  spec.seed = 3;
  const auto a = generate(spec);
  const auto b = generate(spec);
  REQUIRE(a.size() == b.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].students == b[k].students);
    CHECK(a[k].grades == b[k].grades);
    CHECK((a[k].features.array() == b[k].features.array()).all());
  }
  spec.seed = 4;
  CHECK(!(generate(spec)[0].features.rows() == a[0].features.rows() &&
          (generate(spec)[0].features.array() == a[0].features.array()).all()));

  const auto la = generate_event_logs(spec);
  const auto lb = generate_event_logs(spec);
  for (std::size_t k = 0; k < la.size(); ++k) {
    CHECK(la[k].events == lb[k].events);
    CHECK(la[k].schedule == lb[k].schedule);
  }
}

TEST_CASE("a training-table shaped cohort generates quickly") {
  SynthSpec spec;
  spec.client_sizes = {52, 60, 54, 163, 107, 175, 105, 106, 73, 56, 150, 35};
  spec.feature_dim = 100;
  spec.client_shift = 1.0;
  spec.seed = 5;
  const auto start = std::chrono::steady_clock::now();
  const auto clients = generate(spec);
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::size_t total = 0;
  for (const auto& c : clients) total += c.size();
  CHECK(clients.size() == 12);
  CHECK(total == 1136);
  CHECK(seconds < 5.0);
}

TEST_CASE("zero shift leaves only sampling noise between client means") {
  SynthSpec spec;
  spec.n_clients = 4;
  spec.feature_dim = 10;
  spec.seed = 6;
  spec.client_sizes = {20, 20, 20, 20};
  const double small = max_mean_distance(generate(spec));
  spec.client_sizes = {2000, 2000, 2000, 2000};
  const double large = max_mean_distance(generate(spec));
  CHECK(large < 0.5 * small);

  spec.client_shift = 1.0;
  const double shifted = max_mean_distance(generate(spec));
  CHECK(shifted > 5.0 * large);
}

TEST_CASE("an additive client offset cancels in student differences") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd latent(6, 5);
  for (Eigen::Index i = 0; i < latent.size(); ++i) latent(i) = normal(rng);
  ClientTransform a{1.0, Eigen::VectorXd::Zero(5)};
  ClientTransform b{1.0, Eigen::VectorXd::Zero(5)};
  for (Eigen::Index j = 0; j < 5; ++j) b.offset(j) = 10.0 * normal(rng);
  const Eigen::MatrixXd fa = apply_client_transform(latent, a);
  const Eigen::MatrixXd fb = apply_client_transform(latent, b);
  for (Eigen::Index i = 0; i < 6; ++i) {
    for (Eigen::Index j = 0; j < 6; ++j) {
      const Eigen::VectorXd da = (fa.row(i) - fa.row(j)).transpose();
      const Eigen::VectorXd db = (fb.row(i) - fb.row(j)).transpose();
      CHECK((da - db).cwiseAbs().maxCoeff() <= 1e-12);
      CHECK((da - (latent.row(i) - latent.row(j)).transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
}

TEST_CASE("synthetic event logs follow the weekly schedule") {
  SynthSpec spec;
  spec.n_clients = 2;
  spec.client_sizes = {40, 30};
  spec.lecture_count = 8;
  spec.seed = 9;
  const auto courses = generate_event_logs(spec);
  REQUIRE(courses.size() == 2);
  for (const auto& c : courses) {
    CHECK(c.schedule.size() == 8);
    CHECK(c.grades.size() == (c.client_id == "C01" ? 40u : 30u));
    std::vector<std::size_t> per_week(8, 0);
    for (const auto& e : c.events) {
      CHECK(e.event_time >= c.schedule.front() - std::chrono::hours{24 * 7});
      CHECK(e.event_time <= c.schedule.back());
      const auto week = static_cast<std::size_t>(
          std::lower_bound(c.schedule.begin(), c.schedule.end(), e.event_time) -
          c.schedule.begin());
      ++per_week[week];
    }
    const double mean = std::accumulate(per_week.begin(), per_week.end(), 0.0) / 8.0;
    for (std::size_t w : per_week) CHECK(std::abs(static_cast<double>(w) - mean) < 0.15 * mean);
  }
  SynthSpec bad = spec;
  bad.client_sizes = {1};
  CHECK_THROWS_AS(generate_event_logs(bad), Error);
}

}  // namespace
}  // namespace atrisk
