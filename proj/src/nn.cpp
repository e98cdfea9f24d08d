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

#include "mdgan/nn.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <utility>

#include "mdgan/errors.hpp"

namespace mdgan {

namespace {

void apply_activation(Activation activation, const Tensor& pre, Tensor& out) {
  switch (activation) {
    case Activation::kRelu:
      out = pre.cwiseMax(0.0);
      break;
    case Activation::kTanh:
      out = pre.array().tanh().matrix();
      break;
    case Activation::kSigmoid:
      out = (1.0 / (1.0 + (-pre.array()).exp())).matrix();
      break;
    case Activation::kIdentity:
      out = pre;
      break;
  }
}

// Multiplies `grad` in place by the activation derivative.
void scale_by_derivative(Activation activation, const Tensor& pre,
                         const Tensor& post, Tensor& grad) {
  switch (activation) {
    case Activation::kRelu:
      grad = (pre.array() > 0.0).select(grad, 0.0);
      break;
    case Activation::kTanh:
      grad.array() *= 1.0 - post.array().square();
      break;
    case Activation::kSigmoid:
      grad.array() *= post.array() * (1.0 - post.array());
      break;
    case Activation::kIdentity:
      break;
  }
}

void check_cache(const Mlp& net, const ForwardCache& cache,
                 const Tensor& output_grad) {
  if (cache.depth() != net.depth() ||
      cache.activations.size() != net.depth() + 1) {
    throw StateError("forward cache depth does not match network depth");
  }
  for (std::size_t i = 0; i < net.depth(); ++i) {
    if (static_cast<std::size_t>(cache.activations[i].cols()) !=
            net.layer(i).in_dim() ||
        static_cast<std::size_t>(cache.pre_activations[i].cols()) !=
            net.layer(i).out_dim()) {
      throw StateError("forward cache was produced by a different network");
    }
  }
  const Tensor& out = cache.output();
  if (output_grad.rows() != out.rows() || output_grad.cols() != out.cols()) {
    std::ostringstream msg;
    msg << "output gradient shape (" << output_grad.rows() << ", "
        << output_grad.cols() << ") != forward output shape (" << out.rows()
        << ", " << out.cols() << ")";
    throw ShapeError(msg.str());
  }
}

// Shared reverse sweep. Parameter gradients are added into `params` when it is
// non-null; the input gradient is written to `inputs` when it is non-null.
void reverse_sweep(const Mlp& net, const ForwardCache& cache,
                   const Tensor& output_grad, Gradients* params,
                   Tensor* inputs) {
  check_cache(net, cache, output_grad);
  Tensor delta = output_grad;
  for (std::size_t li = net.depth(); li-- > 0;) {
    const Layer& layer = net.layer(li);
    scale_by_derivative(layer.activation, cache.pre_activations[li],
                        cache.activations[li + 1], delta);
    if (params != nullptr) {
      params->layers[li].weights.noalias() +=
          cache.activations[li].transpose() * delta;
      params->layers[li].bias += delta.colwise().sum();
    }
    if (li > 0 || inputs != nullptr) {
      Tensor prev = delta * layer.weights.transpose();
      delta = std::move(prev);
    }
  }
  if (inputs != nullptr) *inputs = std::move(delta);
}

std::vector<Layer> make_layers(std::span<const std::size_t> dims,
                               Activation hidden, Activation output) {
  if (dims.size() < 2) {
    throw ShapeError("an MLP needs at least an input and an output width");
  }
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    if (dims[i] == 0 || dims[i + 1] == 0) {
      throw ShapeError("layer widths must be positive");
    }
    Layer layer;
    layer.weights = Tensor::Zero(static_cast<Eigen::Index>(dims[i]),
                                 static_cast<Eigen::Index>(dims[i + 1]));
    layer.bias = RowVector::Zero(static_cast<Eigen::Index>(dims[i + 1]));
    layer.activation = (i + 2 == dims.size()) ? output : hidden;
    layers.push_back(std::move(layer));
  }
  return layers;
}

}  // namespace

std::string_view to_string(Activation activation) {
  switch (activation) {
    case Activation::kRelu:
      return "relu";
    case Activation::kTanh:
      return "tanh";
    case Activation::kSigmoid:
      return "sigmoid";
    case Activation::kIdentity:
      return "identity";
  }
  return "unknown";
}

Activation parse_activation(std::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  if (name == "sigmoid") return Activation::kSigmoid;
  if (name == "identity") return Activation::kIdentity;
  throw ConfigError("unknown activation '" + std::string(name) + "'");
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw ShapeError("an MLP needs at least one layer");
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& layer = layers_[i];
    if (layer.bias.size() != layer.weights.cols()) {
      throw ShapeError("bias width does not match layer output width");
    }
    if (i + 1 < layers_.size() &&
        layer.out_dim() != layers_[i + 1].in_dim()) {
      std::ostringstream msg;
      msg << "layer " << i << " outputs " << layer.out_dim()
          << " features but layer " << i + 1 << " expects "
          << layers_[i + 1].in_dim();
      throw ShapeError(msg.str());
    }
    param_count_ += static_cast<std::size_t>(layer.weights.size() +
                                             layer.bias.size());
  }
}

Mlp Mlp::glorot(std::span<const std::size_t> dims, Activation hidden,
                Activation output, Rng& rng) {
  std::vector<Layer> layers = make_layers(dims, hidden, output);
  for (Layer& layer : layers) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(layer.in_dim() + layer.out_dim()));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        layer.weights(r, c) = dist(rng);
      }
    }
  }
  return Mlp(std::move(layers));
}

Mlp Mlp::zeros(std::span<const std::size_t> dims, Activation hidden,
               Activation output) {
  return Mlp(make_layers(dims, hidden, output));
}

std::size_t Mlp::in_dim() const {
  return layers_.empty() ? 0 : layers_.front().in_dim();
}

std::size_t Mlp::out_dim() const {
  return layers_.empty() ? 0 : layers_.back().out_dim();
}

std::vector<double> Mlp::flatten() const {
  std::vector<double> out;
  out.reserve(param_count_);
  for (const Layer& layer : layers_) {
    out.insert(out.end(), layer.weights.data(),
               layer.weights.data() + layer.weights.size());
    out.insert(out.end(), layer.bias.data(),
               layer.bias.data() + layer.bias.size());
  }
  return out;
}

void Mlp::assign(std::span<const double> params) {
  if (params.size() != param_count_) {
    std::ostringstream msg;
    msg << "parameter vector has " << params.size() << " entries, network has "
        << param_count_;
    throw ShapeError(msg.str());
  }
  std::size_t offset = 0;
  for (Layer& layer : layers_) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) {
      layer.weights.data()[i] = params[offset++];
    }
    for (Eigen::Index i = 0; i < layer.bias.size(); ++i) {
      layer.bias[i] = params[offset++];
    }
  }
}

bool Mlp::operator==(const Mlp& other) const {
  if (layers_.size() != other.layers_.size()) return false;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& a = layers_[i];
    const Layer& b = other.layers_[i];
    if (a.activation != b.activation ||
        a.weights.rows() != b.weights.rows() ||
        a.weights.cols() != b.weights.cols() || a.weights != b.weights ||
        a.bias != b.bias) {
      return false;
    }
  }
  return true;
}

Gradients Gradients::zeros_like(const Mlp& net) {
  Gradients grads;
  grads.layers.reserve(net.depth());
  for (const Layer& layer : net.layers()) {
    grads.layers.push_back(
        {Tensor::Zero(layer.weights.rows(), layer.weights.cols()),
         RowVector::Zero(layer.bias.size())});
  }
  return grads;
}

Gradients& Gradients::operator+=(const Gradients& other) {
  if (layers.size() != other.layers.size()) {
    throw StateError("gradient depth mismatch");
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weights += other.layers[i].weights;
    layers[i].bias += other.layers[i].bias;
  }
  return *this;
}

Gradients& Gradients::operator*=(double scale) {
  for (LayerGradient& layer : layers) {
    layer.weights *= scale;
    layer.bias *= scale;
  }
  return *this;
}

std::vector<double> Gradients::flatten() const {
  std::vector<double> out;
  for (const LayerGradient& layer : layers) {
    out.insert(out.end(), layer.weights.data(),
               layer.weights.data() + layer.weights.size());
    out.insert(out.end(), layer.bias.data(),
               layer.bias.data() + layer.bias.size());
  }
  return out;
}

bool Gradients::all_finite() const {
  for (const LayerGradient& layer : layers) {
    if (!layer.weights.allFinite() || !layer.bias.allFinite()) return false;
  }
  return true;
}

bool Gradients::matches(const Mlp& net) const {
  if (layers.size() != net.depth()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& layer = net.layer(i);
    if (layers[i].weights.rows() != layer.weights.rows() ||
        layers[i].weights.cols() != layer.weights.cols() ||
        layers[i].bias.size() != layer.bias.size()) {
      return false;
    }
  }
  return true;
}

ForwardResult forward(const Mlp& net, const Tensor& batch) {
  if (static_cast<std::size_t>(batch.cols()) != net.in_dim()) {
    std::ostringstream msg;
    msg << "batch has " << batch.cols() << " columns, network expects "
        << net.in_dim();
    throw ShapeError(msg.str());
  }
  ForwardResult result;
  ForwardCache& cache = result.cache;
  cache.activations.reserve(net.depth() + 1);
  cache.pre_activations.reserve(net.depth());
  cache.activations.push_back(batch);
  for (const Layer& layer : net.layers()) {
    Tensor pre = cache.activations.back() * layer.weights;
    pre.rowwise() += layer.bias;
    Tensor post;
    apply_activation(layer.activation, pre, post);
    cache.pre_activations.push_back(std::move(pre));
    cache.activations.push_back(std::move(post));
  }
  if (!cache.output().allFinite()) {
    throw NumericError("non-finite network output");
  }
  result.output = cache.output();
  return result;
}

Tensor evaluate(const Mlp& net, const Tensor& batch) {
  return forward(net, batch).output;
}

Gradients backward_params(const Mlp& net, const ForwardCache& cache,
                          const Tensor& output_grad) {
  Gradients grads = Gradients::zeros_like(net);
  reverse_sweep(net, cache, output_grad, &grads, nullptr);
  return grads;
}

Tensor backward_inputs(const Mlp& net, const ForwardCache& cache,
                       const Tensor& output_grad) {
  Tensor inputs;
  reverse_sweep(net, cache, output_grad, nullptr, &inputs);
  return inputs;
}

Backprop backward(const Mlp& net, const ForwardCache& cache,
                  const Tensor& output_grad) {
  Backprop result{Gradients::zeros_like(net), Tensor()};
  reverse_sweep(net, cache, output_grad, &result.params, &result.inputs);
  return result;
}

void accumulate_backward_params(const Mlp& net, const ForwardCache& cache,
                                const Tensor& output_grad, Gradients& into) {
  if (!into.matches(net)) {
    throw StateError("gradient accumulator is not shaped like the network");
  }
  reverse_sweep(net, cache, output_grad, &into, nullptr);
}

AdamState::AdamState(const Mlp& net, AdamConfig adam_config)
    : config(adam_config),
      first_moment(Gradients::zeros_like(net)),
      second_moment(Gradients::zeros_like(net)) {}

void adam_apply(Mlp& net, const Gradients& direction, AdamState& state) {
  if (!direction.matches(net) || !state.first_moment.matches(net) ||
      !state.second_moment.matches(net)) {
    throw StateError("Adam state or gradient is not shaped like the network");
  }
  if (!direction.all_finite()) {
    throw NumericError("non-finite gradient passed to Adam");
  }
  const AdamConfig& cfg = state.config;
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double correct1 = 1.0 - std::pow(cfg.beta1, t);
  const double correct2 = 1.0 - std::pow(cfg.beta2, t);
  for (std::size_t i = 0; i < net.depth(); ++i) {
    Layer& layer = net.layer(i);
    LayerGradient& m = state.first_moment.layers[i];
    LayerGradient& v = state.second_moment.layers[i];
    const LayerGradient& g = direction.layers[i];

    m.weights = cfg.beta1 * m.weights + (1.0 - cfg.beta1) * g.weights;
    v.weights = cfg.beta2 * v.weights +
                (1.0 - cfg.beta2) * g.weights.cwiseProduct(g.weights);
    layer.weights.array() +=
        cfg.learning_rate * (m.weights.array() / correct1) /
        ((v.weights.array() / correct2).sqrt() + cfg.epsilon);

    m.bias = cfg.beta1 * m.bias + (1.0 - cfg.beta1) * g.bias;
    v.bias = cfg.beta2 * v.bias +
             (1.0 - cfg.beta2) * g.bias.cwiseProduct(g.bias);
    layer.bias.array() += cfg.learning_rate * (m.bias.array() / correct1) /
                          ((v.bias.array() / correct2).sqrt() + cfg.epsilon);
  }
}

}  // namespace mdgan
