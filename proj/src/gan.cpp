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

#include "mdgan/gan.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "mdgan/errors.hpp"

namespace mdgan {

namespace {

constexpr double kLn2 = std::numbers::ln2;

double clamp_probability(double p) {
  return std::clamp(p, kProbabilityFloor, 1.0 - kProbabilityFloor);
}

bool inside_clamp(double p) {
  return p >= kProbabilityFloor && p <= 1.0 - kProbabilityFloor;
}

std::vector<std::size_t> layer_dims(std::size_t in, const NetworkShape& shape,
                                    std::size_t out) {
  std::vector<std::size_t> dims{in};
  dims.insert(dims.end(), shape.hidden.begin(), shape.hidden.end());
  dims.push_back(out);
  return dims;
}

void check_batch_sizes(const DataBatch& a, const DataBatch& b) {
  if (a.size() == 0 || a.size() != b.size()) {
    throw ShapeError("real and generated batches must be non-empty and of "
                     "equal size");
  }
}

// d/dp of (1/b) sum log2 clamp(p).
Tensor real_term_output_grad(const Tensor& probabilities,
                             std::size_t batch_size) {
  Tensor grad(probabilities.rows(), probabilities.cols());
  const double scale = 1.0 / (static_cast<double>(batch_size) * kLn2);
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double p = probabilities.data()[i];
    grad.data()[i] = inside_clamp(p) ? scale / p : 0.0;
  }
  return grad;
}

}  // namespace

Generator make_generator(std::size_t noise_dim, std::size_t data_dim,
                         const NetworkShape& shape, AdamConfig adam,
                         Rng& rng) {
  const auto dims = layer_dims(noise_dim, shape, data_dim);
  Generator g;
  g.net = Mlp::glorot(dims, shape.hidden_activation, Activation::kIdentity,
                      rng);
  g.noise_dim = noise_dim;
  g.adam = AdamState(g.net, adam);
  return g;
}

Discriminator make_discriminator(std::size_t data_dim,
                                 const NetworkShape& shape, AdamConfig adam,
                                 Rng& rng) {
  const auto dims = layer_dims(data_dim, shape, 1);
  Discriminator d;
  d.net =
      Mlp::glorot(dims, shape.hidden_activation, Activation::kSigmoid, rng);
  d.adam = AdamState(d.net, adam);
  return d;
}

NoiseBatch sample_noise(std::size_t batch_size, std::size_t noise_dim,
                        Rng& rng) {
  if (batch_size == 0 || noise_dim == 0) {
    throw ShapeError("noise batch dimensions must be positive");
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  NoiseBatch z{Tensor(static_cast<Eigen::Index>(batch_size),
                      static_cast<Eigen::Index>(noise_dim))};
  for (Eigen::Index i = 0; i < z.samples.size(); ++i) {
    z.samples.data()[i] = normal(rng);
  }
  return z;
}

DataBatch sample_real(const Tensor& data, std::size_t batch_size, Rng& rng) {
  if (data.rows() == 0) throw ConfigError("cannot sample from empty data");
  std::uniform_int_distribution<Eigen::Index> pick(0, data.rows() - 1);
  DataBatch batch{Tensor(static_cast<Eigen::Index>(batch_size), data.cols()),
                  Origin::kReal};
  for (std::size_t i = 0; i < batch_size; ++i) {
    batch.samples.row(static_cast<Eigen::Index>(i)) = data.row(pick(rng));
  }
  return batch;
}

DataBatch generate(const Generator& g, const NoiseBatch& z) {
  return generate_with_cache(g, z).batch;
}

GeneratedBatch generate_with_cache(const Generator& g, const NoiseBatch& z) {
  if (static_cast<std::size_t>(z.samples.cols()) != g.noise_dim) {
    std::ostringstream msg;
    msg << "noise dimension " << z.samples.cols() << " != generator noise "
        << "dimension " << g.noise_dim;
    throw ShapeError(msg.str());
  }
  ForwardResult fr = forward(g.net, z.samples);
  return {DataBatch{std::move(fr.output), Origin::kGenerated},
          std::move(fr.cache)};
}

Tensor generated_term_output_grad(const Tensor& probabilities,
                                  std::size_t batch_size) {
  Tensor grad(probabilities.rows(), probabilities.cols());
  const double scale = -1.0 / (static_cast<double>(batch_size) * kLn2);
  for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
    const double q = 1.0 - probabilities.data()[i];
    grad.data()[i] = inside_clamp(q) ? scale / q : 0.0;
  }
  return grad;
}

double real_term(const Discriminator& d, const DataBatch& x) {
  const Tensor p = evaluate(d.net, x.samples);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    sum += std::log2(clamp_probability(p.data()[i]));
  }
  return sum / static_cast<double>(x.size());
}

double generated_term(const Discriminator& d, const DataBatch& x) {
  const Tensor p = evaluate(d.net, x.samples);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    sum += std::log2(clamp_probability(1.0 - p.data()[i]));
  }
  return sum / static_cast<double>(x.size());
}

double disc_loss(const Discriminator& d, const DataBatch& x_real,
                 const DataBatch& x_gen) {
  check_batch_sizes(x_real, x_gen);
  return real_term(d, x_real) + generated_term(d, x_gen);
}

Gradients disc_gradient(const Discriminator& d, const DataBatch& x_real,
                        const DataBatch& x_gen) {
  check_batch_sizes(x_real, x_gen);
  const std::size_t b = x_real.size();
  ForwardResult real = forward(d.net, x_real.samples);
  ForwardResult gen = forward(d.net, x_gen.samples);
  Gradients grads = Gradients::zeros_like(d.net);
  accumulate_backward_params(d.net, real.cache,
                             real_term_output_grad(real.output, b), grads);
  accumulate_backward_params(d.net, gen.cache,
                             generated_term_output_grad(gen.output, b), grads);
  return grads;
}

void disc_learning_step(Discriminator& d, const DataBatch& x_real,
                        const DataBatch& x_gen, int steps) {
  if (steps < 1) throw ConfigError("discriminator steps must be >= 1");
  for (int l = 0; l < steps; ++l) {
    // Ascent on J_disc: the gradient itself is the direction of travel.
    adam_apply(d.net, disc_gradient(d, x_real, x_gen), d.adam);
  }
}

double gen_loss(const Generator& g, const Discriminator& d,
                const NoiseBatch& z) {
  return generated_term(d, generate(g, z));
}

FeedbackBundle feedback_for_batch(const Discriminator& d,
                                  const DataBatch& x_gen) {
  if (x_gen.origin != Origin::kGenerated) {
    throw ProtocolError("feedback requested for a batch of real data");
  }
  ForwardResult fr = forward(d.net, x_gen.samples);
  return {backward_inputs(d.net, fr.cache,
                          generated_term_output_grad(fr.output, x_gen.size()))};
}

Gradients gen_gradient(const Generator& g, const Discriminator& d,
                       const NoiseBatch& z) {
  GeneratedBatch gen = generate_with_cache(g, z);
  const FeedbackBundle feedback = feedback_for_batch(d, gen.batch);
  return backward_params(g.net, gen.cache, feedback.errors);
}

void gen_learning_step(Generator& g, const Discriminator& d,
                       const NoiseBatch& z) {
  Gradients direction = gen_gradient(g, d, z);
  direction *= -1.0;
  adam_apply(g.net, direction, g.adam);
}

void local_gan_iteration(Generator& g, Discriminator& d, const Tensor& data,
                         std::size_t batch_size, int disc_steps,
                         Rng& noise_rng, Rng& real_rng) {
  const DataBatch x_real = sample_real(data, batch_size, real_rng);
  const DataBatch x_gen =
      generate(g, sample_noise(batch_size, g.noise_dim, noise_rng));
  disc_learning_step(d, x_real, x_gen, disc_steps);
  gen_learning_step(g, d, sample_noise(batch_size, g.noise_dim, noise_rng));
}

MetricsSeries standalone_train(Generator& g, Discriminator& d,
                               const Tensor& data,
                               const StandaloneConfig& config,
                               const Scorer& scorer) {
  if (data.rows() == 0) throw ConfigError("standalone training needs data");
  Rng noise_rng = make_rng(config.seed, Stream::kNoise, 1);
  Rng real_rng = make_rng(config.seed, Stream::kRealSamples, 1);
  MetricsSeries series;
  for (std::int64_t i = 1; i <= config.iterations; ++i) {
    local_gan_iteration(g, d, data, config.batch_size, config.disc_steps,
                        noise_rng, real_rng);
    if (scorer && config.checkpoints.contains(i)) {
      series.push_back(scorer(g, i));
    }
  }
  return series;
}

}  // namespace mdgan
