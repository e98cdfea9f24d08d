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

// Reference implementations used by the tests. They work one sample at a
// time on plain loops and share no code with the library's Eigen paths.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "mdgan/nn.hpp"

namespace mdgan::oracle {

inline double activate(Activation a, double z) {
  switch (a) {
    case Activation::kRelu:
      return z > 0.0 ? z : 0.0;
    case Activation::kTanh:
      return std::tanh(z);
    case Activation::kSigmoid:
      return 1.0 / (1.0 + std::exp(-z));
    case Activation::kIdentity:
      return z;
  }
  return z;
}

inline double activate_derivative(Activation a, double z) {
  switch (a) {
    case Activation::kRelu:
      return z > 0.0 ? 1.0 : 0.0;
    case Activation::kTanh: {
      const double t = std::tanh(z);
      return 1.0 - t * t;
    }
    case Activation::kSigmoid: {
      const double s = 1.0 / (1.0 + std::exp(-z));
      return s * (1.0 - s);
    }
    case Activation::kIdentity:
      return 1.0;
  }
  return 1.0;
}

inline Tensor matmul(const Tensor& a, const Tensor& b) {
  Tensor out(a.rows(), b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.cols(); ++j) {
      double s = 0.0;
      for (Eigen::Index p = 0; p < a.cols(); ++p) s += a(i, p) * b(p, j);
      out(i, j) = s;
    }
  }
  return out;
}

// Layers taken in order from one or more networks.
using LayerChain = std::vector<const Layer*>;

inline LayerChain chain(std::initializer_list<const Mlp*> nets) {
  LayerChain out;
  for (const Mlp* net : nets) {
    for (const Layer& layer : net->layers()) out.push_back(&layer);
  }
  return out;
}

struct SampleTrace {
  std::vector<std::vector<double>> a;  // a[0] input, a[l + 1] layer l output
  std::vector<std::vector<double>> z;  // pre-activations
};

inline SampleTrace forward_sample(const LayerChain& layers,
                                  const std::vector<double>& x) {
  SampleTrace t;
  t.a.push_back(x);
  for (const Layer* layer : layers) {
    const auto& in = t.a.back();
    const auto out_dim = static_cast<std::size_t>(layer->weights.cols());
    std::vector<double> z(out_dim), a(out_dim);
    for (std::size_t j = 0; j < out_dim; ++j) {
      double s = layer->bias(static_cast<Eigen::Index>(j));
      for (std::size_t i = 0; i < in.size(); ++i) {
        s += in[i] * layer->weights(static_cast<Eigen::Index>(i),
                                    static_cast<Eigen::Index>(j));
      }
      z[j] = s;
      a[j] = activate(layer->activation, s);
    }
    t.z.push_back(std::move(z));
    t.a.push_back(std::move(a));
  }
  return t;
}

inline Tensor forward(const LayerChain& layers, const Tensor& x) {
  const auto out_dim = layers.back()->weights.cols();
  Tensor out(x.rows(), out_dim);
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<double> row(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[c] = x(r, c);
    const SampleTrace t = forward_sample(layers, row);
    for (Eigen::Index c = 0; c < out_dim; ++c) out(r, c) = t.a.back()[c];
  }
  return out;
}

struct ChainGradient {
  // Flattened like Mlp::flatten over the chain: per layer, weights
  // row-major then bias.
  std::vector<double> params;
  Tensor inputs;
};

// Gradient of sum_r loss_r(output_r) where `dloss(r, output_row)` returns
// d loss_r / d output_row.
inline ChainGradient backward(
    const LayerChain& layers, const Tensor& x,
    const std::function<std::vector<double>(
        Eigen::Index, const std::vector<double>&)>& dloss) {
  std::vector<std::vector<double>> gw(layers.size()), gb(layers.size());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    gw[l].assign(layers[l]->weights.size(), 0.0);
    gb[l].assign(layers[l]->bias.size(), 0.0);
  }
  ChainGradient out;
  out.inputs = Tensor::Zero(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) {
    std::vector<double> row(x.cols());
    for (Eigen::Index c = 0; c < x.cols(); ++c) row[c] = x(r, c);
    const SampleTrace t = forward_sample(layers, row);
    std::vector<double> delta = dloss(r, t.a.back());
    for (std::size_t l = layers.size(); l-- > 0;) {
      const Layer& layer = *layers[l];
      const auto in_dim = static_cast<std::size_t>(layer.weights.rows());
      const auto out_dim = static_cast<std::size_t>(layer.weights.cols());
      std::vector<double> dz(out_dim);
      for (std::size_t j = 0; j < out_dim; ++j) {
        dz[j] = delta[j] * activate_derivative(layer.activation, t.z[l][j]);
        gb[l][j] += dz[j];
      }
      std::vector<double> din(in_dim, 0.0);
      for (std::size_t i = 0; i < in_dim; ++i) {
        for (std::size_t j = 0; j < out_dim; ++j) {
          gw[l][i * out_dim + j] += t.a[l][i] * dz[j];
          din[i] += dz[j] * layer.weights(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(j));
        }
      }
      delta = std::move(din);
    }
    for (Eigen::Index c = 0; c < x.cols(); ++c) out.inputs(r, c) = delta[c];
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out.params.insert(out.params.end(), gw[l].begin(), gw[l].end());
    out.params.insert(out.params.end(), gb[l].begin(), gb[l].end());
  }
  return out;
}

inline double clamp_probability(double p) {
  return std::clamp(p, 1e-12, 1.0 - 1e-12);
}

// (1/b) sum log2(1 - p_i), the generated-data term.
inline double generated_term(const Tensor& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    s += std::log2(1.0 - clamp_probability(p(i, 0)));
  }
  return s / static_cast<double>(p.rows());
}

// (1/b) sum log2(p_i), the real-data term.
inline double real_term(const Tensor& p) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < p.rows(); ++i) {
    s += std::log2(clamp_probability(p(i, 0)));
  }
  return s / static_cast<double>(p.rows());
}

// d/dp of one sample's contribution to generated_term, batch size b.
inline double generated_term_dp(double p, std::size_t b) {
  return -1.0 / ((1.0 - p) * std::numbers::ln2 * static_cast<double>(b));
}

// Gradient of generated_term(D(G(z))) over the chained G then D layers; the
// first G.param_count() entries of `params` are the generator's.
inline ChainGradient generated_term_gradient(const Mlp& g, const Mlp& d,
                                             const Tensor& z) {
  const auto b = static_cast<std::size_t>(z.rows());
  return backward(chain({&g, &d}), z,
                  [b](Eigen::Index, const std::vector<double>& out) {
                    return std::vector<double>{generated_term_dp(out[0], b)};
                  });
}

inline double relative_error(double a, double b, double floor = 1e-12) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), floor});
}

// Largest |a - b| / max(|a|, |b|, floor) over two vectors; the floor keeps
// coordinates that are zero in both from dividing by zero.
inline double max_relative_error(const std::vector<double>& a,
                                 const std::vector<double>& b,
                                 double floor) {
  if (a.size() != b.size()) return 1e300;
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double denom =
        std::max({std::abs(a[i]), std::abs(b[i]), floor, 1e-300});
    worst = std::max(worst, std::abs(a[i] - b[i]) / denom);
  }
  return worst;
}

// Central difference of f at every coordinate of `x` listed in `coords`.
inline std::vector<double> central_differences(
    std::vector<double> x, const std::vector<std::size_t>& coords,
    const std::function<double(const std::vector<double>&)>& f,
    double h = 1e-5) {
  std::vector<double> out;
  out.reserve(coords.size());
  for (std::size_t c : coords) {
    const double saved = x[c];
    x[c] = saved + h;
    const double up = f(x);
    x[c] = saved - h;
    const double down = f(x);
    x[c] = saved;
    out.push_back((up - down) / (2.0 * h));
  }
  return out;
}

inline std::vector<double> to_vector(const Tensor& t) {
  return std::vector<double>(t.data(), t.data() + t.size());
}

inline Tensor from_vector(const std::vector<double>& v, Eigen::Index rows,
                          Eigen::Index cols) {
  Tensor t(rows, cols);
  std::copy(v.begin(), v.end(), t.data());
  return t;
}

}  // namespace mdgan::oracle
