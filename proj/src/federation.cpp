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
#include "atrisk/federation.hpp"

#include <chrono>
#include <future>

namespace atrisk {

std::string_view training_mode_name(TrainingMode mode) {
  return mode == TrainingMode::kFederated ? "federated" : "centralized";
}

bool parse_training_mode(std::string_view text, TrainingMode* out) {
  if (text == "federated") {
    *out = TrainingMode::kFederated;
  } else if (text == "centralized") {
    *out = TrainingMode::kCentralized;
  } else {
    return false;
  }
  return true;
}

void FederationConfig::validate() const {
  if (rounds < 1) throw Error(ErrorCode::kInvalidArgument, "rounds must be >= 1");
  if (threads < 1) throw Error(ErrorCode::kInvalidArgument, "threads must be >= 1");
  MlpConfig probe = mlp;
  if (probe.input_dim == 0) probe.input_dim = 1;
  probe.validate();
}

std::uint64_t init_seed(std::uint64_t run_seed) { return derive_seed(run_seed, 0); }
std::uint64_t client_seed(std::uint64_t run_seed, std::size_t client_index) {
  return derive_seed(run_seed, 1 + client_index);
}
std::uint64_t pair_seed(std::uint64_t run_seed, std::size_t client_index) {
  return derive_seed(run_seed ^ 0x5bd1e995ULL, 1 + client_index);
}

SampleSet build_training_set(const ClientDataset& client, bool use_differential,
                             std::size_t max_pairs, std::uint64_t seed) {
  if (!use_differential) return direct_samples(client);
  const std::vector<PairSample> pairs =
      max_pairs == 0 ? make_pairs(client) : pair_cap(client, max_pairs, seed);
  return to_sample_set(pairs, client.dimension());
}

namespace {

MlpConfig client_mlp(const FederationConfig& config, const std::string& client_id,
                     std::size_t client_index) {
  MlpConfig mlp = config.mlp;
  mlp.seed = client_seed(config.seed, client_index);
  const auto it = config.client_overrides.find(client_id);
  if (it != config.client_overrides.end()) {
    const MlpOverrides& o = it->second;
    if (o.learning_rate) mlp.learning_rate = *o.learning_rate;
    if (o.batch_size) mlp.batch_size = *o.batch_size;
    if (o.local_epochs_per_round) mlp.local_epochs_per_round = *o.local_epochs_per_round;
    if (o.seed) mlp.seed = *o.seed;
  }
  mlp.validate();
  return mlp;
}

// Validates the client list and returns the resolved network config.
MlpConfig resolve_mlp(std::span<const ClientDataset> clients,
                      const FederationConfig& config) {
  config.validate();
  if (clients.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "training needs at least one client");
  }
  MlpConfig mlp = config.mlp;
  const Eigen::Index dim = clients.front().dimension();
  if (mlp.input_dim == 0) mlp.input_dim = dim;
  for (const ClientDataset& c : clients) {
    if (c.size() == 0) {
      throw Error(ErrorCode::kEmptyInput, "client '" + c.client_id + "' has no students");
    }
    if (c.dimension() != mlp.input_dim) {
      throw Error(ErrorCode::kLayoutMismatch,
                  "client '" + c.client_id + "' has feature dimension " +
                      std::to_string(c.dimension()) + ", expected " +
                      std::to_string(mlp.input_dim));
    }
    if (config.use_differential && c.size() < 2) {
      throw Error(ErrorCode::kInvalidArgument,
                  "client '" + c.client_id +
                      "' needs at least 2 students for differential features");
    }
  }
  mlp.validate();
  return mlp;
}

ModelParams<double> initial_params(const MlpConfig& mlp, std::uint64_t run_seed) {
  MlpConfig init = mlp;
  init.seed = init_seed(run_seed);
  return init_params<double>(init);
}

}  // namespace

LocalClient::LocalClient(const ClientDataset& data, const FederationConfig& config,
                         std::size_t client_index)
    : id_(data.client_id),
      samples_(build_training_set(data, config.use_differential,
                                  config.max_pairs_per_client,
                                  pair_seed(config.seed, client_index))),
      mlp_(client_mlp(config, data.client_id, client_index)),
      rng_(mlp_.seed) {
  mlp_.input_dim = data.dimension();
}

ClientUpdate<double> LocalClient::train_round(const ModelParams<double>& global) {
  ClientUpdate<double> update{id_, global, static_cast<std::size_t>(samples_.size())};
  for (int e = 0; e < mlp_.local_epochs_per_round; ++e) {
    auto result = train_epoch(update.params, samples_.inputs, samples_.targets, mlp_, rng_);
    update.params = std::move(result.params);
    last_loss_ = result.mean_loss;
  }
  return update;
}

FederatedServer::FederatedServer(std::vector<std::unique_ptr<ClientEndpoint>> clients,
                                 std::size_t threads)
    : clients_(std::move(clients)), threads_(std::max<std::size_t>(threads, 1)) {
  if (clients_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "federation needs at least one client");
  }
}

FederationRound FederatedServer::run_round(std::size_t round_index,
                                           const ModelParams<double>& global) {
  FederationRound round;
  round.round_index = round_index;
  round.incoming = global;
  round.client_updates.resize(clients_.size());

  auto train_one = [&](std::size_t k) {
    try {
      round.client_updates[k] = clients_[k]->train_round(global);
    } catch (const Error& e) {
      throw Error(e.code(), "client '" + clients_[k]->id() + "': " + e.what());
    }
  };
  if (threads_ == 1) {
    for (std::size_t k = 0; k < clients_.size(); ++k) train_one(k);
  } else {
    for (std::size_t start = 0; start < clients_.size(); start += threads_) {
      std::vector<std::future<void>> jobs;
      const std::size_t end = std::min(clients_.size(), start + threads_);
      for (std::size_t k = start; k < end; ++k) {
        jobs.push_back(std::async(std::launch::async, train_one, k));
      }
      for (auto& job : jobs) job.get();
    }
  }
  round.outgoing = fedavg(round.client_updates);
  if (observer_) observer_(round);
  return round;
}

TrainingRunReport run_federated(std::span<const ClientDataset> clients,
                                const FederationConfig& config,
                                FederatedServer::RoundObserver observer) {
  const auto started = std::chrono::steady_clock::now();
  const MlpConfig mlp = resolve_mlp(clients, config);

  std::vector<std::unique_ptr<ClientEndpoint>> endpoints;
  std::vector<const LocalClient*> locals;
  for (std::size_t k = 0; k < clients.size(); ++k) {
    FederationConfig local = config;
    local.mlp.input_dim = mlp.input_dim;
    auto client = std::make_unique<LocalClient>(clients[k], local, k);
    locals.push_back(client.get());
    endpoints.push_back(std::move(client));
  }
  FederatedServer server(std::move(endpoints), config.threads);
  if (observer) server.set_observer(std::move(observer));

  TrainingRunReport report;
  report.mode = TrainingMode::kFederated;
  report.use_differential = config.use_differential;
  report.config = config;
  report.config.mlp.input_dim = mlp.input_dim;

  ModelParams<double> global = initial_params(mlp, config.seed);
  for (std::size_t t = 1; t <= config.rounds; ++t) {
    FederationRound round = server.run_round(t, global);
    double weighted = 0.0;
    std::size_t total = 0;
    for (std::size_t k = 0; k < locals.size(); ++k) {
      const std::size_t n = round.client_updates[k].sample_count;
      weighted += static_cast<double>(n) * locals[k]->last_loss();
      total += n;
    }
    report.round_losses.push_back(weighted / static_cast<double>(total));
    if (t == 1) {
      for (const auto& u : round.client_updates) {
        report.client_sample_counts.emplace_back(u.client_id, u.sample_count);
      }
    }
    global = std::move(round.outgoing);
  }
  report.final_params = std::move(global);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

TrainingRunReport run_centralized(std::span<const ClientDataset> clients,
                                  const FederationConfig& config) {
  const auto started = std::chrono::steady_clock::now();
  const MlpConfig mlp = resolve_mlp(clients, config);

  TrainingRunReport report;
  report.mode = TrainingMode::kCentralized;
  report.use_differential = config.use_differential;
  report.config = config;
  report.config.mlp.input_dim = mlp.input_dim;

  std::vector<SampleSet> parts;
  Eigen::Index rows = 0;
  for (std::size_t k = 0; k < clients.size(); ++k) {
    parts.push_back(build_training_set(clients[k], config.use_differential,
                                       config.max_pairs_per_client,
                                       pair_seed(config.seed, k)));
    rows += parts.back().size();
    report.client_sample_counts.emplace_back(clients[k].client_id,
                                             static_cast<std::size_t>(parts.back().size()));
  }
  SampleSet pooled;
  pooled.inputs.resize(rows, mlp.input_dim);
  pooled.targets.resize(rows);
  Eigen::Index at = 0;
  for (const SampleSet& p : parts) {
    pooled.inputs.middleRows(at, p.size()) = p.inputs;
    pooled.targets.segment(at, p.size()) = p.targets;
    at += p.size();
  }
  parts.clear();

  MlpConfig train_cfg = mlp;
  train_cfg.seed = client_seed(config.seed, 0);
  std::mt19937_64 rng(train_cfg.seed);
  ModelParams<double> params = initial_params(mlp, config.seed);
  for (std::size_t t = 1; t <= config.rounds; ++t) {
    double loss = 0.0;
    for (int e = 0; e < train_cfg.local_epochs_per_round; ++e) {
      auto result = train_epoch(params, pooled.inputs, pooled.targets, train_cfg, rng);
      params = std::move(result.params);
      loss = result.mean_loss;
    }
    report.round_losses.push_back(loss);
  }
  report.final_params = std::move(params);
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

TrainingRunReport run_training(std::span<const ClientDataset> clients,
                               const FederationConfig& config) {
  return config.mode == TrainingMode::kFederated ? run_federated(clients, config)
                                                 : run_centralized(clients, config);
}

}  // namespace atrisk
