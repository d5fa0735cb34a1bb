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
#ifndef ATRISK_SYNTHGEN_HPP_
#define ATRISK_SYNTHGEN_HPP_

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atrisk/domain_data.hpp"

namespace atrisk {

// Synthetic multi-course cohort. Every course shares one latent behaviour
// law (features grow with ability along a fixed direction); courses differ
// by an additive feature offset and a multiplicative scale whose spread is
// controlled by client_shift.
struct SynthSpec {
  std::size_t n_clients = 12;
  std::size_t students_min = 35;
  std::size_t students_max = 175;
  // When non-empty, the size of each client (overrides min/max).
  std::vector<std::size_t> client_sizes;
  Eigen::Index feature_dim = 100;
  // Grade probabilities ordered F, D, C, B, A. Empty: uniform. One entry:
  // shared by all clients. Otherwise one entry per client.
  std::vector<std::array<double, 5>> grade_probs;
  double signal_strength = 1.0;
  double client_shift = 0.0;
  double noise_std = 0.1;
  std::uint64_t seed = 0;
  std::size_t lecture_count = 15;

  void validate() const;
};

struct ClientTransform {
  double scale = 1.0;
  Eigen::VectorXd offset;
};

// scale * latent + offset, applied to every row.
Eigen::MatrixXd apply_client_transform(const Eigen::MatrixXd& latent,
                                       const ClientTransform& transform);

// Clients named C01, C02, ...; students "<client>-S###".
std::vector<ClientDataset> generate(const SynthSpec& spec);

// A course rendered as raw logs instead of features.
struct SyntheticCourse {
  std::string client_id;
  std::vector<EventRecord> events;
  LectureSchedule schedule;
  std::vector<GradeRecord> grades;
};

struct SynthLogOptions {
  OperationVocab vocab = OperationVocab::standard();
  double base_rate = 2.0;  // mean events per operation per lecture
  Timestamp course_start = std::chrono::sys_days{std::chrono::year{2021} /
                                                 std::chrono::April / 5};
};

// Weekly lectures with stationary per-week activity: each student's event
// rate per operation depends on ability and the course scale, never on the
// week. Uses n_clients, sizes, grade_probs, signal_strength, client_shift
// (as the activity scale spread), noise_std (ability jitter), seed and
// lecture_count from `spec`.
std::vector<SyntheticCourse> generate_event_logs(const SynthSpec& spec,
                                                 const SynthLogOptions& options = {});

}  // namespace atrisk

#endif  // ATRISK_SYNTHGEN_HPP_
