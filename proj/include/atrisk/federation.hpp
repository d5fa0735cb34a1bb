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
#ifndef ATRISK_FEDERATION_HPP_
#define ATRISK_FEDERATION_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "atrisk/diffpairs.hpp"
#include "atrisk/domain_data.hpp"
#include "atrisk/neuralnet.hpp"

namespace atrisk {

enum class TrainingMode { kFederated, kCentralized };

std::string_view training_mode_name(TrainingMode mode);
bool parse_training_mode(std::string_view text, TrainingMode* out);

// Per-client optimizer settings. Layout-defining fields are global so that
// every client update can be averaged.
struct MlpOverrides {
  std::optional<double> learning_rate;
  std::optional<Eigen::Index> batch_size;
  std::optional<int> local_epochs_per_round;
  std::optional<std::uint64_t> seed;
};

struct FederationConfig {
  std::size_t rounds = 100;
  TrainingMode mode = TrainingMode::kFederated;
  bool use_differential = true;
  MlpConfig mlp;  // input_dim 0 means "take it from the data"
  std::map<std::string, MlpOverrides> client_overrides;
  std::uint64_t seed = 0;
  std::size_t max_pairs_per_client = 0;  // 0 trains on every ordered pair
  std::size_t threads = 1;

  void validate() const;
};

// What a client sends back after local training. This is the only data that
// crosses from a client to the server.
template <typename Scalar = double>
struct ClientUpdate {
  std::string client_id;
  ModelParams<Scalar> params;
  std::size_t sample_count = 0;
};

// Weighted parameter average: sum_k (n_k / N) * w_k, accumulated in the
// given client order.
template <typename Scalar>
ModelParams<Scalar> fedavg(std::span<const ClientUpdate<Scalar>> updates) {
  if (updates.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "fedavg needs at least one update");
  }
  const MlpLayout& layout = updates.front().params.layout();
  std::size_t total = 0;
  for (const auto& u : updates) {
    if (!(u.params.layout() == layout) || u.params.size() != layout.parameter_count()) {
      throw Error(ErrorCode::kLayoutMismatch,
                  "client '" + u.client_id + "' sent layout " +
                      u.params.layout().describe() + ", client '" +
                      updates.front().client_id + "' sent " + layout.describe());
    }
    if (u.sample_count == 0) {
      throw Error(ErrorCode::kInvalidArgument,
                  "client '" + u.client_id + "' reported zero samples");
    }
    total += u.sample_count;
  }
  const Scalar n_total = static_cast<Scalar>(total);
  ModelParams<Scalar> out(layout);
  for (const auto& u : updates) {
    const Scalar weight = static_cast<Scalar>(u.sample_count) / n_total;
    out.values().noalias() += weight * u.params.values();
  }
  return out;
}

template <typename Scalar>
ModelParams<Scalar> fedavg(const std::vector<ClientUpdate<Scalar>>& updates) {
  return fedavg(std::span<const ClientUpdate<Scalar>>(updates));
}

// Server-side view of a client. Implementations keep their data private;
// the server can only hand out global parameters and receive updates.
class ClientEndpoint {
 public:
  virtual ~ClientEndpoint() = default;
  virtual const std::string& id() const = 0;
  virtual ClientUpdate<double> train_round(const ModelParams<double>& global) = 0;
};

// The client-side training set: differential pairs (optionally capped) or
// the students' own (features, score) rows.
SampleSet build_training_set(const ClientDataset& client, bool use_differential,
                             std::size_t max_pairs, std::uint64_t pair_seed);

// In-process client. Takes ownership of its dataset, derives the training
// set once and keeps only that.
class LocalClient final : public ClientEndpoint {
 public:
  LocalClient(const ClientDataset& data, const FederationConfig& config,
              std::size_t client_index);

  const std::string& id() const override { return id_; }
  ClientUpdate<double> train_round(const ModelParams<double>& global) override;

  // Training loss of the last local epoch. Read by the simulation harness
  // for reporting; never sent to the server.
  double last_loss() const { return last_loss_; }

 private:
  std::string id_;
  SampleSet samples_;
  MlpConfig mlp_;
  std::mt19937_64 rng_;
  double last_loss_ = 0.0;
};

struct FederationRound {
  std::size_t round_index = 0;  // 1-based
  ModelParams<double> incoming;
  std::vector<ClientUpdate<double>> client_updates;
  ModelParams<double> outgoing;
};

class FederatedServer {
 public:
  using RoundObserver = std::function<void(const FederationRound&)>;

  explicit FederatedServer(std::vector<std::unique_ptr<ClientEndpoint>> clients,
                           std::size_t threads = 1);

  void set_observer(RoundObserver observer) { observer_ = std::move(observer); }
  std::size_t client_count() const { return clients_.size(); }

  // Broadcast, collect updates in client order, aggregate.
  FederationRound run_round(std::size_t round_index, const ModelParams<double>& global);

 private:
  std::vector<std::unique_ptr<ClientEndpoint>> clients_;
  std::size_t threads_;
  RoundObserver observer_;
};

struct TrainingRunReport {
  TrainingMode mode = TrainingMode::kFederated;
  bool use_differential = true;
  std::vector<double> round_losses;  // sample-weighted, one per round
  ModelParams<double> final_params;
  std::vector<std::pair<std::string, std::size_t>> client_sample_counts;
  double wall_clock_seconds = 0.0;
  FederationConfig config;
};

// Seeds used by the runners, exposed so callers can reproduce them.
std::uint64_t init_seed(std::uint64_t run_seed);
std::uint64_t client_seed(std::uint64_t run_seed, std::size_t client_index);
std::uint64_t pair_seed(std::uint64_t run_seed, std::size_t client_index);

TrainingRunReport run_federated(std::span<const ClientDataset> clients,
                                const FederationConfig& config,
                                FederatedServer::RoundObserver observer = {});

// Pools every client's training set (pairs are still formed within each
// client) and trains rounds * local_epochs_per_round epochs.
TrainingRunReport run_centralized(std::span<const ClientDataset> clients,
                                  const FederationConfig& config);

TrainingRunReport run_training(std::span<const ClientDataset> clients,
                               const FederationConfig& config);

}  // namespace atrisk

#endif  // ATRISK_FEDERATION_HPP_
