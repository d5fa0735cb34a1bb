#include "atrisk/featurizer.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

namespace atrisk {
namespace {

Timestamp at(const char* text) {
  Timestamp t;
  REQUIRE(parse_rfc3339(text, &t));
  return t;
}

std::vector<EventRecord> random_events(std::mt19937_64& rng, const std::vector<std::string>& ops,
                                       const std::vector<std::string>& students, std::size_t n,
                                       Timestamp start, Timestamp end) {
  std::uniform_int_distribution<long> offset(0, (end - start).count());
  std::uniform_int_distribution<std::size_t> pick_op(0, ops.size() - 1);
  std::uniform_int_distribution<std::size_t> pick_student(0, students.size() - 1);
  std::vector<EventRecord> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({students[pick_student(rng)], "m", ops[pick_op(rng)],
                   start + std::chrono::seconds{offset(rng)}});
  }
  return out;
}

TEST_CASE("hand-counted two-operation vector") {
  const FeatureSpec spec{{"NEXT", "PREV"}, 1};
  const CourseSpan span{at("2021-04-01T00:00:00Z"), at("2021-05-01T00:00:00Z")};
  const std::vector<EventRecord> events{
      {"s", "m", "NEXT", at("2021-04-02T00:00:00Z")},
      {"s", "m", "PREV", at("2021-04-03T00:00:00Z")},
      {"s", "m", "NEXT", at("2021-04-04T00:00:00Z")},
      {"s", "m", "OPEN", at("2021-04-04T00:00:00Z")},
      {"s", "m", "NEXT", at("2021-04-05T00:00:00Z")},
  };
  const FeatureMap f = featurize(events, spec, span);
  REQUIRE(f.at("s").size() == 2);
  CHECK(f.at("s")(0) == 3.0);
  CHECK(f.at("s")(1) == 1.0);
}

TEST_CASE("time buckets split the course span evenly") {
  const FeatureSpec spec{{"NEXT"}, 4};
  const CourseSpan span{at("2021-04-01T00:00:00Z"), at("2021-04-05T00:00:00Z")};
  const std::vector<EventRecord> events{
      {"s", "m", "NEXT", at("2021-04-01T00:00:00Z")},
      {"s", "m", "NEXT", at("2021-04-02T12:00:00Z")},
      {"s", "m", "NEXT", at("2021-04-03T00:00:00Z")},
      {"s", "m", "NEXT", at("2021-04-05T00:00:00Z")},
  };
  const Eigen::VectorXd v = featurize(events, spec, span).at("s");
  CHECK(v(0) == 1.0);
  CHECK(v(1) == 1.0);
  CHECK(v(2) == 1.0);
  CHECK(v(3) == 1.0);
  CHECK_THROWS_AS(featurize(events, spec, {span.start, at("2021-04-04T00:00:00Z")}), Error);
}

TEST_CASE("roster students without events get zero vectors") {
  const FeatureSpec spec{OperationVocab::standard().names, 4};
  const std::vector<std::string> roster{"idle"};
  const FeatureMap f = featurize({}, spec, {at("2021-04-01T00:00:00Z"), at("2021-05-01T00:00:00Z")},
                                 roster);
  REQUIRE(f.count("idle") == 1);
  CHECK(f.at("idle").size() == 36);
  CHECK(f.at("idle").isZero(0.0));
}

TEST_CASE("event weight scales every count and is part of the layout") {
  const CourseSpan span{at("2021-04-01T00:00:00Z"), at("2021-05-01T00:00:00Z")};
  const std::vector<EventRecord> events{
      {"s", "m", "NEXT", at("2021-04-02T00:00:00Z")},
      {"s", "m", "NEXT", at("2021-04-03T00:00:00Z")},
      {"s", "m", "PREV", at("2021-04-04T00:00:00Z")},
  };
  FeatureSpec spec{{"NEXT", "PREV"}, 1};
  const Eigen::VectorXd unit = featurize(events, spec, span).at("s");
  spec.event_weight = 0.25;
  const Eigen::VectorXd scaled = featurize(events, spec, span).at("s");
  CHECK(scaled == 0.25 * unit);
  CHECK(spec.hash() != FeatureSpec{{"NEXT", "PREV"}, 1}.hash());
  spec.event_weight = 0.0;
  CHECK_THROWS_AS(featurize(events, spec, span), Error);
}

TEST_CASE("empty vocabulary is rejected") {
  CHECK_THROWS_AS(featurize({}, FeatureSpec{{}, 4},
                            {at("2021-04-01T00:00:00Z"), at("2021-05-01T00:00:00Z")}),
                  Error);
}

TEST_CASE("counting properties: doubling, additivity, permutation, truncation") {
  std::mt19937_64 rng(3);
  const FeatureSpec spec{{"OPEN", "NEXT", "PREV"}, 4};
  const std::vector<std::string> ops{"OPEN", "NEXT", "PREV", "OTHER"};
  const std::vector<std::string> students{"a", "b", "c"};
  const Timestamp start = at("2021-04-05T00:00:00Z");
  const LectureSchedule schedule{at("2021-04-11T23:59:59Z"), at("2021-04-18T23:59:59Z"),
                                 at("2021-04-25T23:59:59Z"), at("2021-05-02T23:59:59Z")};
  const CourseSpan span{start, schedule.back()};
  for (int trial = 0; trial < 50; ++trial) {
    auto e1 = random_events(rng, ops, students, 40, start, schedule.back());
    auto e2 = random_events(rng, ops, students, 30, start, schedule.back());
    const FeatureMap f1 = featurize(e1, spec, span, students);
    const FeatureMap f2 = featurize(e2, spec, span, students);

    std::vector<EventRecord> both = e1;
    both.insert(both.end(), e2.begin(), e2.end());
    std::shuffle(both.begin(), both.end(), rng);
    const FeatureMap f12 = featurize(both, spec, span, students);

    std::vector<EventRecord> doubled = e1;
    doubled.insert(doubled.end(), e1.begin(), e1.end());
    const FeatureMap f11 = featurize(doubled, spec, span, students);

    std::vector<EventRecord> permuted = e1;
    std::shuffle(permuted.begin(), permuted.end(), rng);
    const FeatureMap fp = featurize(permuted, spec, span, students);

    const FeatureMap ft = featurize(truncate_events(e1, schedule, 2), spec, span, students);
    for (const std::string& s : students) {
      CHECK(f12.at(s) == f1.at(s) + f2.at(s));
      CHECK(f11.at(s) == 2.0 * f1.at(s));
      CHECK(fp.at(s) == f1.at(s));
      CHECK((ft.at(s).array() <= f1.at(s).array()).all());
    }
  }
}

TEST_CASE("feature CSV round-trips and spec hash tracks the layout") {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  FeatureMap f;
  for (const char* id : {"x", "y", "z"}) {
    Eigen::VectorXd v(5);
    for (int j = 0; j < 5; ++j) v(j) = normal(rng);
    f[id] = v;
  }
  std::stringstream buf;
  write_feature_csv(buf, f);
  const FeatureMap back = parse_feature_csv(buf, "buf");
  REQUIRE(back.size() == 3);
  for (const auto& [id, v] : f) CHECK(back.at(id) == v);

  const FeatureSpec a{{"OPEN", "NEXT"}, 4};
  const FeatureSpec b{{"NEXT", "OPEN"}, 4};
  const FeatureSpec c{{"OPEN", "NEXT"}, 2};
  CHECK(a.hash() == FeatureSpec{{"OPEN", "NEXT"}, 4}.hash());
  CHECK(a.hash() != b.hash());
  CHECK(a.hash() != c.hash());
}

}  // namespace
}  // namespace atrisk
