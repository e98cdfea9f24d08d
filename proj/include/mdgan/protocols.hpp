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

// MD-GAN (one server-side generator, one discriminator per worker, periodic
// discriminator swaps) and the FL-GAN federated-averaging baseline, as
// Protocol implementations for the cluster simulator.

#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "mdgan/cluster.hpp"
#include "mdgan/data.hpp"
#include "mdgan/gan.hpp"
#include "mdgan/rng.hpp"

namespace mdgan {

// 1-based indices into the k generated batches.
struct BatchAssignment {
  std::size_t gen_index = 0;   // X_g, feedback batch
  std::size_t disc_index = 0;  // X_d, discriminator training batch

  bool operator==(const BatchAssignment&) const = default;
};

// Worker n receives X_g = X^((n mod k) + 1) and X_d = X^(((n + 1) mod k) + 1).
// Element n - 1 belongs to worker n. Throws ConfigError unless 1 <= k <= N.
std::vector<BatchAssignment> distribute_batches(std::size_t k,
                                                std::size_t workers);
BatchAssignment batch_for_worker(std::size_t k, std::size_t worker);

// Iterations between swaps (MD-GAN) or rounds (FL-GAN): m * E / b, at least 1.
std::int64_t iterations_per_period(std::size_t shard_size, std::size_t epochs,
                                   std::size_t batch_size);

struct SwapPlan {
  std::vector<std::size_t> workers;  // alive workers, ascending
  std::vector<std::size_t> targets;  // targets[i] receives workers[i]'s params

  std::optional<std::size_t> target_of(std::size_t worker) const;
};

// Uniform random derangement over `alive` (identity for a single worker).
SwapPlan make_swap_plan(const std::vector<std::size_t>& alive, Rng& rng);

// Moves discriminator parameters along the plan; discs[n - 1] is worker n's.
// Optimizer state stays with the worker.
void apply_swap(const SwapPlan& plan, std::vector<Discriminator>& discs);

struct MdGanConfig {
  std::size_t k = 1;
  std::size_t batch_size = 10;
  int disc_steps = 1;
  // Swap every this many iterations; 0 disables swapping.
  std::int64_t swap_period = 0;
  std::uint64_t seed = 0;
};

struct MdGanWorkerState {
  Discriminator disc;
  Tensor shard;
  Rng real_rng;
  bool crashed = false;
};

// Per-iteration record of how the server averaged feedback.
struct AggregationRecord {
  std::int64_t iteration = 0;
  std::size_t alive_workers = 0;
  std::size_t feedbacks = 0;
  std::size_t divisor = 0;
};

class MdGanProtocol : public Protocol {
 public:
  // Every worker starts from a copy of `initial_disc`.
  MdGanProtocol(MdGanConfig config, Generator generator,
                const Discriminator& initial_disc,
                const std::vector<Shard>& shards);

  std::size_t worker_count() const override { return workers_.size(); }
  void server_send(SimContext& ctx) override;
  void worker_step(SimContext& ctx, std::size_t worker) override;
  void server_receive(SimContext& ctx) override;
  void peer_exchange(SimContext& ctx) override;
  void on_crash(std::size_t worker) override;

  const Generator& server_generator() const override { return generator_; }
  const MdGanConfig& config() const { return config_; }
  const MdGanWorkerState& worker(std::size_t n) const {
    return workers_.at(n - 1);
  }
  const std::vector<AggregationRecord>& aggregation_trace() const {
    return trace_;
  }
  // Delta w of the most recent merge, before the Adam step.
  const Gradients& last_generator_gradient() const { return last_gradient_; }
  std::int64_t swaps_performed() const { return swaps_; }

  // Server-side merge: back-propagates each worker's feedback through the
  // cached forward pass of the batch it was sent, scaled by 1 / N_alive.
  // Exposed for the gradient-equivalence checks.
  static Gradients merge_feedback(
      const Generator& g, const std::vector<GeneratedBatch>& batches,
      const std::map<std::size_t, FeedbackBundle>& feedbacks,
      std::size_t k);

 private:
  MdGanConfig config_;
  Generator generator_;
  std::vector<MdGanWorkerState> workers_;
  Rng noise_rng_;
  Rng swap_rng_;
  std::vector<GeneratedBatch> batches_;
  std::vector<AggregationRecord> trace_;
  Gradients last_gradient_;
  std::int64_t swaps_ = 0;
};

// Worker half of one MD-GAN iteration: `steps` discriminator steps on
// (X_r, X_d), then feedback on X_g with the updated discriminator.
FeedbackBundle mdgan_worker_iteration(Discriminator& disc,
                                      const DataBatch& x_real,
                                      const DataBatch& x_disc,
                                      const DataBatch& x_gen, int steps);

struct FlGanConfig {
  std::size_t batch_size = 10;
  int disc_steps = 1;
  std::int64_t round_period = 1;
  std::uint64_t seed = 0;
};

struct FlGanWorkerState {
  Generator gen;
  Discriminator disc;
  Tensor shard;
  Rng noise_rng;
  Rng real_rng;
  bool crashed = false;
};

class FlGanProtocol : public Protocol {
 public:
  // Server and every worker start from the same (generator, disc) pair.
  FlGanProtocol(FlGanConfig config, const Generator& generator,
                const Discriminator& disc, const std::vector<Shard>& shards);

  std::size_t worker_count() const override { return workers_.size(); }
  void server_send(SimContext& ctx) override;
  void worker_step(SimContext& ctx, std::size_t worker) override;
  void server_receive(SimContext& ctx) override;
  void peer_exchange(SimContext& ctx) override;
  void on_crash(std::size_t worker) override;

  const Generator& server_generator() const override { return generator_; }
  const Discriminator& server_discriminator() const { return disc_; }
  const FlGanWorkerState& worker(std::size_t n) const {
    return workers_.at(n - 1);
  }
  std::int64_t rounds_completed() const { return rounds_; }

 private:
  bool round_boundary(std::int64_t iteration) const;

  FlGanConfig config_;
  Generator generator_;
  Discriminator disc_;
  std::vector<FlGanWorkerState> workers_;
  std::int64_t rounds_ = 0;
};

// Element-wise mean of equally sized parameter vectors, in input order.
std::vector<double> average_parameters(
    const std::vector<std::vector<double>>& params);

}  // namespace mdgan
