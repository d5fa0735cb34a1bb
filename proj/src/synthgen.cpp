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
#include "atrisk/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

namespace atrisk {

namespace {

constexpr std::uint64_t kPatternStream = 0x7061;
constexpr std::uint64_t kClientStream = 0x1000;

std::string client_name(std::size_t k) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "C%02zu", k + 1);
  return buf;
}

std::string student_name(const std::string& client, std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "-S%03zu", i + 1);
  return client + buf;
}

const std::array<double, 5>& client_probs(const SynthSpec& spec, std::size_t k) {
  static const std::array<double, 5> kUniform{0.2, 0.2, 0.2, 0.2, 0.2};
  if (spec.grade_probs.empty()) return kUniform;
  if (spec.grade_probs.size() == 1) return spec.grade_probs.front();
  return spec.grade_probs[k];
}

std::size_t client_size(const SynthSpec& spec, std::size_t k, std::mt19937_64& rng) {
  if (!spec.client_sizes.empty()) return spec.client_sizes[k];
  std::uniform_int_distribution<std::size_t> pick(spec.students_min, spec.students_max);
  return pick(rng);
}

std::vector<Grade> draw_grades(const std::array<double, 5>& probs, std::size_t n,
                               std::mt19937_64& rng) {
  std::discrete_distribution<int> pick(probs.begin(), probs.end());
  std::vector<Grade> grades(n);
  for (Grade& g : grades) g = static_cast<Grade>(pick(rng) + 1);
  return grades;
}

double ability_of(Grade g, double jitter) {
  return (static_cast<double>(static_cast<int>(g)) - 1.0) / 4.0 + jitter;
}

}  // namespace

void SynthSpec::validate() const {
  if (n_clients < 1) throw Error(ErrorCode::kInvalidArgument, "n_clients must be >= 1");
  if (client_sizes.empty()) {
    if (students_min < 1 || students_max < students_min) {
      throw Error(ErrorCode::kInvalidArgument,
                  "students per client must satisfy 1 <= min <= max");
    }
  } else {
    if (client_sizes.size() != n_clients) {
      throw Error(ErrorCode::kInvalidArgument,
                  "client_sizes must list one size per client");
    }
    for (std::size_t s : client_sizes) {
      if (s < 1) throw Error(ErrorCode::kInvalidArgument, "client with zero students");
    }
  }
  if (feature_dim < 1) throw Error(ErrorCode::kInvalidArgument, "feature_dim must be >= 1");
  if (grade_probs.size() > 1 && grade_probs.size() != n_clients) {
    throw Error(ErrorCode::kInvalidArgument,
                "grade_probs must have 0, 1 or n_clients entries");
  }
  for (const auto& p : grade_probs) {
    double sum = 0.0;
    for (double v : p) {
      if (!(v >= 0.0)) throw Error(ErrorCode::kInvalidArgument, "negative grade probability");
      sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-9) {
      throw Error(ErrorCode::kInvalidArgument, "grade probabilities must sum to 1");
    }
  }
  if (!(signal_strength >= 0.0) || !(client_shift >= 0.0) || !(noise_std >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "signal_strength, client_shift and noise_std must be >= 0");
  }
  if (lecture_count < 1) throw Error(ErrorCode::kInvalidArgument, "lecture_count must be >= 1");
}

Eigen::MatrixXd apply_client_transform(const Eigen::MatrixXd& latent,
                                       const ClientTransform& transform) {
  Eigen::MatrixXd out = transform.scale * latent;
  out.rowwise() += transform.offset.transpose();
  return out;
}

std::vector<ClientDataset> generate(const SynthSpec& spec) {
  spec.validate();
  const Eigen::Index dim = spec.feature_dim;

  std::mt19937_64 pattern_rng(derive_seed(spec.seed, kPatternStream));
  std::uniform_real_distribution<double> base_dist(0.5, 1.5);
  std::uniform_real_distribution<double> dir_dist(0.0, 1.0);
  Eigen::VectorXd base(dim), direction(dim);
  for (Eigen::Index j = 0; j < dim; ++j) base(j) = base_dist(pattern_rng);
  for (Eigen::Index j = 0; j < dim; ++j) direction(j) = dir_dist(pattern_rng);

  const double unit = 1.0 / std::sqrt(static_cast<double>(dim));
  std::vector<ClientDataset> clients;
  clients.reserve(spec.n_clients);
  for (std::size_t k = 0; k < spec.n_clients; ++k) {
    std::mt19937_64 rng(derive_seed(spec.seed, kClientStream + k));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = client_size(spec, k, rng);
    const std::vector<Grade> grades = draw_grades(client_probs(spec, k), n, rng);

    ClientTransform transform;
    transform.scale = std::exp(0.3 * spec.client_shift * normal(rng));
    transform.offset.resize(dim);
    for (Eigen::Index j = 0; j < dim; ++j) transform.offset(j) = spec.client_shift * normal(rng);

    Eigen::MatrixXd latent(static_cast<Eigen::Index>(n), dim);
    for (std::size_t i = 0; i < n; ++i) {
      const double ability = ability_of(grades[i], spec.noise_std * normal(rng));
      const auto r = static_cast<Eigen::Index>(i);
      latent.row(r) = (base + spec.signal_strength * ability * direction).transpose();
      for (Eigen::Index j = 0; j < dim; ++j) latent(r, j) += spec.noise_std * normal(rng);
    }
    // Rows of unit-order norm regardless of the dimension.
    const Eigen::MatrixXd features = apply_client_transform(latent, transform) * unit;

    const std::string id = client_name(k);
    std::map<std::string, Eigen::VectorXd> by_student;
    std::vector<GradeRecord> records;
    for (std::size_t i = 0; i < n; ++i) {
      const std::string sid = student_name(id, i);
      by_student[sid] = features.row(static_cast<Eigen::Index>(i)).transpose();
      records.push_back({sid, grades[i]});
    }
    clients.push_back(make_client(id, by_student, records, spec.lecture_count));
  }
  return clients;
}

std::vector<SyntheticCourse> generate_event_logs(const SynthSpec& spec,
                                                 const SynthLogOptions& options) {
  spec.validate();
  if (options.vocab.names.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "synthetic logs need a vocabulary");
  }
  if (!(options.base_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "base_rate must be positive");
  }
  const std::size_t n_ops = options.vocab.names.size();

  // Per-operation popularity and ability sensitivity, shared by all courses.
  std::mt19937_64 pattern_rng(derive_seed(spec.seed, kPatternStream));
  std::uniform_real_distribution<double> weight_dist(0.3, 1.5);
  std::uniform_real_distribution<double> gain_dist(-0.5, 1.5);
  std::vector<double> weight(n_ops), gain(n_ops);
  for (std::size_t o = 0; o < n_ops; ++o) weight[o] = weight_dist(pattern_rng);
  for (std::size_t o = 0; o < n_ops; ++o) gain[o] = gain_dist(pattern_rng);

  const std::chrono::seconds week{7 * 24 * 3600};
  std::vector<SyntheticCourse> courses;
  for (std::size_t k = 0; k < spec.n_clients; ++k) {
    std::mt19937_64 rng(derive_seed(spec.seed, kClientStream + k));
    std::normal_distribution<double> normal(0.0, 1.0);
    const std::size_t n = client_size(spec, k, rng);
    const std::vector<Grade> grades = draw_grades(client_probs(spec, k), n, rng);
    const double scale = std::exp(0.3 * spec.client_shift * normal(rng));

    SyntheticCourse course;
    course.client_id = client_name(k);
    for (std::size_t l = 1; l <= spec.lecture_count; ++l) {
      course.schedule.push_back(options.course_start + week * static_cast<long>(l) -
                                std::chrono::seconds{1});
    }
    std::uniform_int_distribution<long> offset_in_week(0, week.count() - 1);
    for (std::size_t i = 0; i < n; ++i) {
      const std::string sid = student_name(course.client_id, i);
      course.grades.push_back({sid, grades[i]});
      const double ability = ability_of(grades[i], spec.noise_std * normal(rng));
      for (std::size_t o = 0; o < n_ops; ++o) {
        const double rate = options.base_rate * weight[o] * scale *
                            std::exp(spec.signal_strength * gain[o] * (ability - 0.5));
        std::poisson_distribution<int> count(rate);
        for (std::size_t l = 0; l < spec.lecture_count; ++l) {
          const Timestamp week_start = options.course_start + week * static_cast<long>(l);
          const int events = count(rng);
          for (int e = 0; e < events; ++e) {
            char material[16];
            std::snprintf(material, sizeof material, "M%02zu", l + 1);
            course.events.push_back({sid, material, options.vocab.names[o],
                                     week_start + std::chrono::seconds{offset_in_week(rng)}});
          }
        }
      }
    }
    sort_events(course.events);
    courses.push_back(std::move(course));
  }
  return courses;
}

}  // namespace atrisk
