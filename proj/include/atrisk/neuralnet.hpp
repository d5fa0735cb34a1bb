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
#ifndef ATRISK_NEURALNET_HPP_
#define ATRISK_NEURALNET_HPP_

// Two-hidden-layer ReLU regressor with inverted dropout, trained by
// mini-batch SGD on mean squared error. Parameters live in one flat vector
// in the order (W1, b1, W2, b2, W3, b3), weight matrices row-major, so that
// they can be averaged across clients without knowing the architecture.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "atrisk/common.hpp"

namespace atrisk {

enum class Mode { kTrain, kEval };

struct MlpConfig {
  Eigen::Index input_dim = 0;
  std::array<Eigen::Index, 2> hidden{50, 10};
  double dropout_rate = 0.2;
  double learning_rate = 0.01;
  Eigen::Index batch_size = 64;
  int local_epochs_per_round = 1;
  std::uint64_t seed = 0;

  void validate() const {
    if (input_dim < 1) {
      throw Error(ErrorCode::kInvalidArgument, "input_dim must be >= 1");
    }
    if (hidden[0] < 1 || hidden[1] < 1) {
      throw Error(ErrorCode::kInvalidArgument, "hidden sizes must be >= 1");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
      throw Error(ErrorCode::kInvalidArgument, "dropout_rate must be in [0,1)");
    }
    if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
      throw Error(ErrorCode::kInvalidArgument, "learning_rate must be finite and >= 0");
    }
    if (batch_size < 1) {
      throw Error(ErrorCode::kInvalidArgument, "batch_size must be >= 1");
    }
    if (local_epochs_per_round < 1) {
      throw Error(ErrorCode::kInvalidArgument, "local_epochs_per_round must be >= 1");
    }
  }
};

struct MlpLayout {
  Eigen::Index input_dim = 0;
  Eigen::Index hidden1 = 0;
  Eigen::Index hidden2 = 0;
  double dropout_rate = 0.0;

  static MlpLayout from_config(const MlpConfig& config) {
    return {config.input_dim, config.hidden[0], config.hidden[1],
            config.dropout_rate};
  }

  Eigen::Index w1_offset() const { return 0; }
  Eigen::Index b1_offset() const { return hidden1 * input_dim; }
  Eigen::Index w2_offset() const { return b1_offset() + hidden1; }
  Eigen::Index b2_offset() const { return w2_offset() + hidden2 * hidden1; }
  Eigen::Index w3_offset() const { return b2_offset() + hidden2; }
  Eigen::Index b3_offset() const { return w3_offset() + hidden2; }
  Eigen::Index parameter_count() const { return b3_offset() + 1; }

  std::string describe() const {
    return "D=" + std::to_string(input_dim) + " hidden=(" +
           std::to_string(hidden1) + "," + std::to_string(hidden2) + ")";
  }

  friend bool operator==(const MlpLayout&, const MlpLayout&) = default;
};

template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Typed views over a flat parameter (or gradient) buffer.
template <typename Scalar, typename Pointer>
struct LayerViews {
  using MatMap = Eigen::Map<std::conditional_t<std::is_const_v<std::remove_pointer_t<Pointer>>,
                                               const RowMat<Scalar>, RowMat<Scalar>>>;
  using VecMap = Eigen::Map<std::conditional_t<std::is_const_v<std::remove_pointer_t<Pointer>>,
                                               const Vec<Scalar>, Vec<Scalar>>>;

  LayerViews(Pointer data, const MlpLayout& l)
      : w1(data + l.w1_offset(), l.hidden1, l.input_dim),
        b1(data + l.b1_offset(), l.hidden1),
        w2(data + l.w2_offset(), l.hidden2, l.hidden1),
        b2(data + l.b2_offset(), l.hidden2),
        w3(data + l.w3_offset(), 1, l.hidden2),
        b3(data + l.b3_offset(), 1) {}

  MatMap w1;
  VecMap b1;
  MatMap w2;
  VecMap b2;
  MatMap w3;
  VecMap b3;
};

template <typename Scalar>
class ModelParams {
 public:
  using Vector = Vec<Scalar>;

  ModelParams() = default;
  explicit ModelParams(const MlpLayout& layout)
      : layout_(layout), values_(Vector::Zero(layout.parameter_count())) {}
  ModelParams(const MlpLayout& layout, Vector values)
      : layout_(layout), values_(std::move(values)) {
    if (values_.size() != layout_.parameter_count()) {
      throw Error(ErrorCode::kLayoutMismatch,
                  "parameter vector has " + std::to_string(values_.size()) +
                      " entries, layout " + layout_.describe() + " needs " +
                      std::to_string(layout_.parameter_count()));
    }
  }

  const MlpLayout& layout() const { return layout_; }
  const Vector& values() const { return values_; }
  Vector& values() { return values_; }
  Eigen::Index size() const { return values_.size(); }

  LayerViews<Scalar, const Scalar*> layers() const { return {values_.data(), layout_}; }
  LayerViews<Scalar, Scalar*> layers() { return {values_.data(), layout_}; }

  bool all_finite() const { return values_.allFinite(); }

  friend bool operator==(const ModelParams& a, const ModelParams& b) {
    return a.layout_ == b.layout_ && a.values_.size() == b.values_.size() &&
           (a.values_.array() == b.values_.array()).all();
  }

 private:
  MlpLayout layout_;
  Vector values_;
};

// Zero-mean normal weights with standard deviation sqrt(2 / fan_in); zero
// biases. Deterministic in config.seed.
template <typename Scalar = double>
ModelParams<Scalar> init_params(const MlpConfig& config) {
  config.validate();
  const MlpLayout layout = MlpLayout::from_config(config);
  ModelParams<Scalar> params(layout);
  std::mt19937_64 rng(config.seed);
  auto fill = [&rng](auto& w, Eigen::Index fan_in) {
    std::normal_distribution<double> normal(0.0, std::sqrt(2.0 / static_cast<double>(fan_in)));
    for (Eigen::Index r = 0; r < w.rows(); ++r) {
      for (Eigen::Index c = 0; c < w.cols(); ++c) w(r, c) = static_cast<Scalar>(normal(rng));
    }
  };
  auto views = params.layers();
  fill(views.w1, layout.input_dim);
  fill(views.w2, layout.hidden1);
  fill(views.w3, layout.hidden2);
  return params;
}

namespace detail {

template <typename Scalar>
Mat<Scalar> dropout_mask(Eigen::Index rows, Eigen::Index cols, double rate,
                         std::mt19937_64& rng) {
  const Scalar keep_scale = static_cast<Scalar>(1.0 / (1.0 - rate));
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  Mat<Scalar> mask(rows, cols);
  // Fill in column-major order; fixed for bit reproducibility.
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      mask(r, c) = uniform(rng) >= rate ? keep_scale : Scalar(0);
    }
  }
  return mask;
}

template <typename Scalar>
struct ForwardCache {
  Mat<Scalar> z1, a1, z2, a2;
  Mat<Scalar> mask1, mask2;  // empty in eval mode
  Vec<Scalar> output;
};

template <typename Scalar, typename Derived>
ForwardCache<Scalar> forward_batch(const ModelParams<Scalar>& params,
                                   const Eigen::MatrixBase<Derived>& inputs,
                                   Mode mode, std::mt19937_64* rng) {
  const MlpLayout& l = params.layout();
  if (inputs.cols() != l.input_dim) {
    throw Error(ErrorCode::kLayoutMismatch,
                "input has dimension " + std::to_string(inputs.cols()) +
                    ", model expects " + std::to_string(l.input_dim));
  }
  const auto v = params.layers();
  const bool drop = mode == Mode::kTrain && l.dropout_rate > 0.0;
  ForwardCache<Scalar> c;
  c.z1 = inputs * v.w1.transpose();
  c.z1.rowwise() += v.b1.transpose();
  c.a1 = c.z1.cwiseMax(Scalar(0));
  if (drop) {
    c.mask1 = dropout_mask<Scalar>(c.a1.rows(), c.a1.cols(), l.dropout_rate, *rng);
    c.a1 = c.a1.cwiseProduct(c.mask1);
  }
  c.z2 = c.a1 * v.w2.transpose();
  c.z2.rowwise() += v.b2.transpose();
  c.a2 = c.z2.cwiseMax(Scalar(0));
  if (drop) {
    c.mask2 = dropout_mask<Scalar>(c.a2.rows(), c.a2.cols(), l.dropout_rate, *rng);
    c.a2 = c.a2.cwiseProduct(c.mask2);
  }
  c.output = c.a2 * v.w3.transpose();
  c.output.array() += v.b3(0);
  return c;
}

}  // namespace detail

// Single-sample forward pass. `rng` is consumed only in train mode.
template <typename Scalar, typename Derived>
Scalar forward(const ModelParams<Scalar>& params, const Eigen::MatrixBase<Derived>& x,
               Mode mode, std::mt19937_64& rng) {
  if (x.size() != params.layout().input_dim) {
    throw Error(ErrorCode::kLayoutMismatch,
                "input has dimension " + std::to_string(x.size()) +
                    ", model expects " + std::to_string(params.layout().input_dim));
  }
  const Mat<Scalar> row = x.derived().template cast<Scalar>().transpose();
  return detail::forward_batch(params, row, mode, &rng).output(0);
}

// Eval-mode predictions, one per row of `inputs`.
template <typename Scalar, typename Derived>
Vec<Scalar> predict_batch(const ModelParams<Scalar>& params,
                          const Eigen::MatrixBase<Derived>& inputs) {
  if (inputs.rows() == 0) return Vec<Scalar>();
  return detail::forward_batch(params, inputs, Mode::kEval, nullptr).output;
}

template <typename Scalar>
struct LossAndGradient {
  Scalar loss;
  Vec<Scalar> gradient;  // same layout as ModelParams::values()
};

// Mean squared error over the rows of `inputs` and its gradient by
// backpropagation. In train mode dropout masks are drawn from `rng`.
template <typename Scalar, typename DerivedX, typename DerivedY>
LossAndGradient<Scalar> loss_and_gradient(const ModelParams<Scalar>& params,
                                          const Eigen::MatrixBase<DerivedX>& inputs,
                                          const Eigen::MatrixBase<DerivedY>& targets,
                                          Mode mode, std::mt19937_64& rng) {
  const MlpLayout& l = params.layout();
  const auto c = detail::forward_batch(params, inputs, mode, &rng);
  const auto n = static_cast<Scalar>(inputs.rows());
  const Vec<Scalar> residual = c.output - targets;

  LossAndGradient<Scalar> out{residual.squaredNorm() / n,
                              Vec<Scalar>::Zero(l.parameter_count())};
  const auto v = params.layers();
  LayerViews<Scalar, Scalar*> g(out.gradient.data(), l);

  const Vec<Scalar> d_out = (Scalar(2) / n) * residual;
  g.w3.noalias() = d_out.transpose() * c.a2;
  g.b3(0) = d_out.sum();

  Mat<Scalar> d_z2 = d_out * v.w3;
  if (c.mask2.size() != 0) d_z2 = d_z2.cwiseProduct(c.mask2);
  d_z2 = (c.z2.array() > Scalar(0)).select(d_z2, Scalar(0));
  g.w2.noalias() = d_z2.transpose() * c.a1;
  g.b2 = d_z2.colwise().sum().transpose();

  Mat<Scalar> d_z1 = d_z2 * v.w2;
  if (c.mask1.size() != 0) d_z1 = d_z1.cwiseProduct(c.mask1);
  d_z1 = (c.z1.array() > Scalar(0)).select(d_z1, Scalar(0));
  g.w1.noalias() = d_z1.transpose() * inputs;
  g.b1 = d_z1.colwise().sum().transpose();
  return out;
}

template <typename Scalar>
struct EpochResult {
  ModelParams<Scalar> params;
  Scalar mean_loss;  // sample-weighted mean of the per-batch training losses
};

// One pass of mini-batch SGD in a seeded shuffled order. The input
// parameters are not modified.
template <typename Scalar, typename DerivedX, typename DerivedY>
EpochResult<Scalar> train_epoch(const ModelParams<Scalar>& params,
                                const Eigen::MatrixBase<DerivedX>& inputs,
                                const Eigen::MatrixBase<DerivedY>& targets,
                                const MlpConfig& config, std::mt19937_64& rng) {
  const Eigen::Index n = inputs.rows();
  if (n == 0) {
    throw Error(ErrorCode::kEmptyInput, "train_epoch needs at least one sample");
  }
  if (targets.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "inputs and targets differ in length");
  }
  if (inputs.cols() != params.layout().input_dim) {
    throw Error(ErrorCode::kLayoutMismatch,
                "input has dimension " + std::to_string(inputs.cols()) +
                    ", model expects " + std::to_string(params.layout().input_dim));
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);

  EpochResult<Scalar> result{params, Scalar(0)};
  const auto lr = static_cast<Scalar>(config.learning_rate);
  const Eigen::Index batch = config.batch_size;
  Mat<Scalar> x_batch;
  Vec<Scalar> y_batch;
  for (Eigen::Index start = 0, b = 0; start < n; start += batch, ++b) {
    const Eigen::Index len = std::min(batch, n - start);
    x_batch.resize(len, inputs.cols());
    y_batch.resize(len);
    for (Eigen::Index r = 0; r < len; ++r) {
      const Eigen::Index src = order[static_cast<std::size_t>(start + r)];
      x_batch.row(r) = inputs.row(src).template cast<Scalar>();
      y_batch(r) = static_cast<Scalar>(targets(src));
    }
    const auto lg = loss_and_gradient(result.params, x_batch, y_batch, Mode::kTrain, rng);
    if (!std::isfinite(static_cast<double>(lg.loss)) || !lg.gradient.allFinite()) {
      throw Error(ErrorCode::kNumerical,
                  "non-finite loss at batch " + std::to_string(b));
    }
    result.params.values().noalias() -= lr * lg.gradient;
    result.mean_loss += lg.loss * static_cast<Scalar>(len);
  }
  result.mean_loss /= static_cast<Scalar>(n);
  return result;
}

// Eval-mode MSE over a dataset, without touching any RNG.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar mean_squared_error(const ModelParams<Scalar>& params,
                          const Eigen::MatrixBase<DerivedX>& inputs,
                          const Eigen::MatrixBase<DerivedY>& targets) {
  if (inputs.rows() == 0) return Scalar(0);
  const Vec<Scalar> pred = predict_batch(params, inputs);
  return (pred - targets).squaredNorm() / static_cast<Scalar>(inputs.rows());
}

}  // namespace atrisk

#endif  // ATRISK_NEURALNET_HPP_
