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

// GAN objectives and learning steps.
//
// All logarithms are base 2 and probabilities are clamped to
// [kProbabilityFloor, 1 - kProbabilityFloor] before taking them. The
// discriminator maximizes J_disc = A(X_r) + B(X_g); the generator minimizes
// J_gen = B(G(Z)), where
//   A(X) = (1/b) sum log2 D(x)      B(X) = (1/b) sum log2 (1 - D(x)).

#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <vector>

#include "mdgan/metrics_row.hpp"
#include "mdgan/nn.hpp"
#include "mdgan/rng.hpp"

namespace mdgan {

inline constexpr double kProbabilityFloor = 1e-12;

// Hidden layer widths plus activation choice for one network.
struct NetworkShape {
  std::vector<std::size_t> hidden;
  Activation hidden_activation = Activation::kRelu;
};

struct Generator {
  Mlp net;
  std::size_t noise_dim = 0;
  AdamState adam;

  std::size_t data_dim() const { return net.out_dim(); }
};

struct Discriminator {
  Mlp net;
  AdamState adam;
};

Generator make_generator(std::size_t noise_dim, std::size_t data_dim,
                         const NetworkShape& shape, AdamConfig adam, Rng& rng);
Discriminator make_discriminator(std::size_t data_dim,
                                 const NetworkShape& shape, AdamConfig adam,
                                 Rng& rng);

struct NoiseBatch {
  Tensor samples;  // b x noise_dim
};

enum class Origin { kReal, kGenerated };

struct DataBatch {
  Tensor samples;  // b x d
  Origin origin = Origin::kReal;

  std::size_t size() const { return static_cast<std::size_t>(samples.rows()); }
};

// Per-sample gradients of B(X_g) with respect to each generated input,
// row i being e_i for sample i. This is what a worker returns to the server.
struct FeedbackBundle {
  Tensor errors;  // b x d

  std::size_t scalar_count() const {
    return static_cast<std::size_t>(errors.size());
  }
};

NoiseBatch sample_noise(std::size_t batch_size, std::size_t noise_dim,
                        Rng& rng);

// Uniform draw of `batch_size` rows with replacement.
DataBatch sample_real(const Tensor& data, std::size_t batch_size, Rng& rng);

DataBatch generate(const Generator& g, const NoiseBatch& z);

struct GeneratedBatch {
  DataBatch batch;
  ForwardCache cache;
};

// Like generate(), keeping the forward cache for later back-propagation.
GeneratedBatch generate_with_cache(const Generator& g, const NoiseBatch& z);

double real_term(const Discriminator& d, const DataBatch& x);       // A
double generated_term(const Discriminator& d, const DataBatch& x);  // B

double disc_loss(const Discriminator& d, const DataBatch& x_real,
                 const DataBatch& x_gen);

// Gradient of J_disc with respect to the discriminator parameters.
Gradients disc_gradient(const Discriminator& d, const DataBatch& x_real,
                        const DataBatch& x_gen);

// `steps` Adam ascent steps on J_disc, all on the same pair of batches.
void disc_learning_step(Discriminator& d, const DataBatch& x_real,
                        const DataBatch& x_gen, int steps);

double gen_loss(const Generator& g, const Discriminator& d,
                const NoiseBatch& z);

// Gradient of J_gen with respect to the generator parameters, computed by
// chaining the discriminator's input gradient through the generator.
Gradients gen_gradient(const Generator& g, const Discriminator& d,
                       const NoiseBatch& z);

// One Adam descent step on J_gen.
void gen_learning_step(Generator& g, const Discriminator& d,
                       const NoiseBatch& z);

FeedbackBundle feedback_for_batch(const Discriminator& d,
                                  const DataBatch& x_gen);

// d/dp of the clamped log2 terms, averaged over `batch_size`; exposed for the
// protocol code, which builds its own output gradients.
Tensor generated_term_output_grad(const Tensor& probabilities,
                                  std::size_t batch_size);

// One discriminator-then-generator iteration on local data. Shared by the
// standalone baseline and FL-GAN workers so the two follow identical draws.
void local_gan_iteration(Generator& g, Discriminator& d, const Tensor& data,
                         std::size_t batch_size, int disc_steps,
                         Rng& noise_rng, Rng& real_rng);

struct StandaloneConfig {
  std::size_t batch_size = 100;
  std::int64_t iterations = 0;
  int disc_steps = 1;
  std::set<std::int64_t> checkpoints;
  std::uint64_t seed = 0;
};

// Trains (g, d) on `data` in place and scores the generator at every
// checkpoint iteration. Randomness is drawn from the streams of worker 1 so
// that a one-worker FL-GAN run reproduces it exactly.
MetricsSeries standalone_train(Generator& g, Discriminator& d,
                               const Tensor& data,
                               const StandaloneConfig& config,
                               const Scorer& scorer);

}  // namespace mdgan
