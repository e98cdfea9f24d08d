// Copyright 2026 The MD-GAN Simulator Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense feed-forward networks in 64-bit floating point: forward pass,
// back-propagation to parameters and to inputs, and the Adam optimizer.

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mdgan/rng.hpp"

namespace mdgan {

// A batch of row vectors (rows = samples, cols = features), row-major.
using Tensor =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowVector = Eigen::RowVectorXd;

enum class Activation { kRelu, kTanh, kSigmoid, kIdentity };

std::string_view to_string(Activation activation);
Activation parse_activation(std::string_view name);

struct Layer {
  Tensor weights;  // in_dim x out_dim
  RowVector bias;  // out_dim
  Activation activation = Activation::kIdentity;

  std::size_t in_dim() const { return static_cast<std::size_t>(weights.rows()); }
  std::size_t out_dim() const {
    return static_cast<std::size_t>(weights.cols());
  }
};

class Mlp {
 public:
  Mlp() = default;
  // Throws ShapeError when consecutive layer dimensions do not chain.
  explicit Mlp(std::vector<Layer> layers);

  // Glorot-uniform weights, zero biases. `dims` lists the layer widths from
  // input to output, so a 2->16->1 net is {2, 16, 1}.
  static Mlp glorot(std::span<const std::size_t> dims, Activation hidden,
                    Activation output, Rng& rng);
  static Mlp zeros(std::span<const std::size_t> dims, Activation hidden,
                   Activation output);

  std::size_t in_dim() const;
  std::size_t out_dim() const;
  std::size_t depth() const { return layers_.size(); }
  std::size_t param_count() const { return param_count_; }

  const std::vector<Layer>& layers() const { return layers_; }
  Layer& layer(std::size_t i) { return layers_.at(i); }
  const Layer& layer(std::size_t i) const { return layers_.at(i); }

  // Parameters in layer order, weights (row-major) then bias per layer.
  std::vector<double> flatten() const;
  void assign(std::span<const double> params);

  bool operator==(const Mlp& other) const;

 private:
  std::vector<Layer> layers_;
  std::size_t param_count_ = 0;
};

struct ForwardCache {
  // activations[0] is the input batch; activations[i + 1] is the output of
  // layer i. pre_activations[i] is layer i before its nonlinearity.
  std::vector<Tensor> activations;
  std::vector<Tensor> pre_activations;

  std::size_t depth() const { return pre_activations.size(); }
  const Tensor& output() const { return activations.back(); }
  const Tensor& input() const { return activations.front(); }
};

struct LayerGradient {
  Tensor weights;
  RowVector bias;
};

struct Gradients {
  std::vector<LayerGradient> layers;

  static Gradients zeros_like(const Mlp& net);

  Gradients& operator+=(const Gradients& other);
  Gradients& operator*=(double scale);

  std::vector<double> flatten() const;
  bool all_finite() const;
  bool matches(const Mlp& net) const;
};

struct ForwardResult {
  Tensor output;
  ForwardCache cache;
};

ForwardResult forward(const Mlp& net, const Tensor& batch);

// Output only; no cache retained.
Tensor evaluate(const Mlp& net, const Tensor& batch);

// Gradient of sum_{rows, cols} output .* output_grad with respect to the
// network parameters.
Gradients backward_params(const Mlp& net, const ForwardCache& cache,
                          const Tensor& output_grad);

// Gradient of the same contraction with respect to the network input.
Tensor backward_inputs(const Mlp& net, const ForwardCache& cache,
                       const Tensor& output_grad);

struct Backprop {
  Gradients params;
  Tensor inputs;
};

Backprop backward(const Mlp& net, const ForwardCache& cache,
                  const Tensor& output_grad);

// Adds the parameter gradient of one back-propagation into `into`, which must
// already be shaped like `net`.
void accumulate_backward_params(const Mlp& net, const ForwardCache& cache,
                                const Tensor& output_grad, Gradients& into);

struct AdamConfig {
  double learning_rate = 2e-4;
  double beta1 = 0.5;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamConfig config;
  Gradients first_moment;
  Gradients second_moment;
  std::int64_t step = 0;

  AdamState() = default;
  AdamState(const Mlp& net, AdamConfig config);
};

// One bias-corrected Adam step. `direction` is the direction to move in, so a
// caller minimizing a loss passes the negated gradient. Throws NumericError on
// non-finite entries and StateError when shapes disagree.
void adam_apply(Mlp& net, const Gradients& direction, AdamState& state);

}  // namespace mdgan
