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

#include <algorithm>
#include <sstream>
#include <utility>

#include "mdgan/errors.hpp"
#include "mdgan/protocols.hpp"

namespace mdgan {

BatchAssignment batch_for_worker(std::size_t k, std::size_t worker) {
  if (k < 1) throw ConfigError("k must be at least 1");
  return {(worker % k) + 1, ((worker + 1) % k) + 1};
}

std::vector<BatchAssignment> distribute_batches(std::size_t k,
                                                std::size_t workers) {
  if (k < 1 || k > workers) {
    std::ostringstream msg;
    msg << "k = " << k << " must satisfy 1 <= k <= N = " << workers;
    throw ConfigError(msg.str());
  }
  std::vector<BatchAssignment> out;
  out.reserve(workers);
  for (std::size_t n = 1; n <= workers; ++n) {
    out.push_back(batch_for_worker(k, n));
  }
  return out;
}

std::int64_t iterations_per_period(std::size_t shard_size, std::size_t epochs,
                                   std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  return std::max<std::int64_t>(
      1, static_cast<std::int64_t>(shard_size * epochs / batch_size));
}

FeedbackBundle mdgan_worker_iteration(Discriminator& disc,
                                      const DataBatch& x_real,
                                      const DataBatch& x_disc,
                                      const DataBatch& x_gen, int steps) {
  disc_learning_step(disc, x_real, x_disc, steps);
  return feedback_for_batch(disc, x_gen);
}

MdGanProtocol::MdGanProtocol(MdGanConfig config, Generator generator,
                             const Discriminator& initial_disc,
                             const std::vector<Shard>& shards)
    : config_(config),
      generator_(std::move(generator)),
      noise_rng_(make_rng(config.seed, Stream::kNoise, 0)),
      swap_rng_(make_rng(config.seed, Stream::kSwap)) {
  distribute_batches(config_.k, shards.size());  // validates k
  if (config_.disc_steps < 1) {
    throw ConfigError("discriminator steps must be >= 1");
  }
  if (config_.swap_period < 0) throw ConfigError("negative swap period");
  workers_.reserve(shards.size());
  for (const Shard& shard : shards) {
    if (shard.samples.rows() == 0) throw ConfigError("empty shard");
    if (static_cast<std::size_t>(shard.samples.cols()) !=
        generator_.data_dim()) {
      throw ShapeError("shard feature dimension != generator output");
    }
    workers_.push_back({initial_disc, shard.samples,
                        make_rng(config.seed, Stream::kRealSamples,
                                 shard.owner),
                        false});
  }
}

void MdGanProtocol::server_send(SimContext& ctx) {
  batches_.clear();
  batches_.reserve(config_.k);
  for (std::size_t j = 0; j < config_.k; ++j) {
    batches_.push_back(generate_with_cache(
        generator_,
        sample_noise(config_.batch_size, generator_.noise_dim, noise_rng_)));
  }
  for (std::size_t n : ctx.network.alive_workers()) {
    const BatchAssignment a = batch_for_worker(config_.k, n);
    ctx.network.send(make_message(
        NodeId::server(), NodeId::worker(n),
        GeneratedBatchPair{batches_[a.disc_index - 1].batch.samples,
                           batches_[a.gen_index - 1].batch.samples}));
  }
}

void MdGanProtocol::worker_step(SimContext& ctx, std::size_t n) {
  MdGanWorkerState& state = workers_.at(n - 1);
  if (state.crashed) return;
  std::vector<Message> inbox = ctx.network.receive_all(NodeId::worker(n));
  if (inbox.size() != 1 ||
      !std::holds_alternative<GeneratedBatchPair>(inbox.front().payload)) {
    throw ProtocolError("worker " + std::to_string(n) +
                        " expected exactly one generated batch pair");
  }
  auto& pair = std::get<GeneratedBatchPair>(inbox.front().payload);
  const DataBatch x_real =
      sample_real(state.shard, config_.batch_size, state.real_rng);
  const DataBatch x_disc{std::move(pair.disc_batch), Origin::kGenerated};
  const DataBatch x_gen{std::move(pair.gen_batch), Origin::kGenerated};
  FeedbackBundle feedback = mdgan_worker_iteration(
      state.disc, x_real, x_disc, x_gen, config_.disc_steps);
  ctx.network.send(make_message(NodeId::worker(n), NodeId::server(),
                                Feedback{std::move(feedback)}));
}

Gradients MdGanProtocol::merge_feedback(
    const Generator& g, const std::vector<GeneratedBatch>& batches,
    const std::map<std::size_t, FeedbackBundle>& feedbacks, std::size_t k) {
  Gradients delta = Gradients::zeros_like(g.net);
  if (feedbacks.empty()) return delta;
  const double scale = 1.0 / static_cast<double>(feedbacks.size());
  for (const auto& [worker, bundle] : feedbacks) {
    const BatchAssignment a = batch_for_worker(k, worker);
    const GeneratedBatch& source = batches.at(a.gen_index - 1);
    if (bundle.errors.rows() != source.batch.samples.rows() ||
        bundle.errors.cols() != source.batch.samples.cols()) {
      throw ProtocolError("feedback from worker " + std::to_string(worker) +
                          " does not match the batch it was sent");
    }
    accumulate_backward_params(g.net, source.cache, scale * bundle.errors,
                               delta);
  }
  return delta;
}

void MdGanProtocol::server_receive(SimContext& ctx) {
  std::map<std::size_t, FeedbackBundle> feedbacks;
  for (Message& msg : ctx.network.receive_all(NodeId::server())) {
    auto* fb = std::get_if<Feedback>(&msg.payload);
    if (fb == nullptr) throw ProtocolError("server expected feedback only");
    if (!feedbacks.emplace(msg.src.index, std::move(fb->bundle)).second) {
      throw ProtocolError("duplicate feedback from " + to_string(msg.src));
    }
  }
  const std::vector<std::size_t> alive = ctx.network.alive_workers();
  for (std::size_t n : alive) {
    if (!feedbacks.contains(n)) {
      throw ProtocolError("missing feedback from alive worker " +
                          std::to_string(n));
    }
  }
  trace_.push_back(
      {ctx.iteration, alive.size(), feedbacks.size(), feedbacks.size()});
  last_gradient_ = merge_feedback(generator_, batches_, feedbacks, config_.k);
  Gradients direction = last_gradient_;
  direction *= -1.0;
  adam_apply(generator_.net, direction, generator_.adam);
  batches_.clear();
}

void MdGanProtocol::peer_exchange(SimContext& ctx) {
  if (config_.swap_period <= 0 || ctx.iteration % config_.swap_period != 0) {
    return;
  }
  const std::vector<std::size_t> alive = ctx.network.alive_workers();
  if (alive.size() < 2) return;
  const SwapPlan plan = make_swap_plan(alive, swap_rng_);
  for (std::size_t i = 0; i < plan.workers.size(); ++i) {
    const std::size_t n = plan.workers[i];
    ctx.network.send(make_message(NodeId::worker(n),
                                  NodeId::worker(plan.targets[i]),
                                  DiscParams{workers_[n - 1].disc.net.flatten()}));
  }
  for (std::size_t n : plan.workers) {
    std::vector<Message> inbox = ctx.network.receive_all(NodeId::worker(n));
    if (inbox.size() != 1 ||
        !std::holds_alternative<DiscParams>(inbox.front().payload)) {
      throw ProtocolError("worker " + std::to_string(n) +
                          " expected exactly one swapped discriminator");
    }
    workers_[n - 1].disc.net.assign(
        std::get<DiscParams>(inbox.front().payload).theta);
  }
  ++swaps_;
}

void MdGanProtocol::on_crash(std::size_t worker) {
  workers_.at(worker - 1).crashed = true;
}

std::optional<std::size_t> SwapPlan::target_of(std::size_t worker) const {
  for (std::size_t i = 0; i < workers.size(); ++i) {
    if (workers[i] == worker) return targets[i];
  }
  return std::nullopt;
}

SwapPlan make_swap_plan(const std::vector<std::size_t>& alive, Rng& rng) {
  if (alive.empty()) throw ConfigError("swap needs at least one worker");
  SwapPlan plan;
  plan.workers = alive;
  std::sort(plan.workers.begin(), plan.workers.end());
  plan.targets = plan.workers;
  if (plan.workers.size() < 2) return plan;
  // Rejection sampling of uniform permutations; about e tries on average.
  while (true) {
    std::shuffle(plan.targets.begin(), plan.targets.end(), rng);
    bool fixed_point = false;
    for (std::size_t i = 0; i < plan.workers.size(); ++i) {
      if (plan.targets[i] == plan.workers[i]) {
        fixed_point = true;
        break;
      }
    }
    if (!fixed_point) return plan;
  }
}

void apply_swap(const SwapPlan& plan, std::vector<Discriminator>& discs) {
  std::vector<std::vector<double>> outgoing;
  outgoing.reserve(plan.workers.size());
  for (std::size_t n : plan.workers) {
    outgoing.push_back(discs.at(n - 1).net.flatten());
  }
  for (std::size_t i = 0; i < plan.workers.size(); ++i) {
    discs.at(plan.targets[i] - 1).net.assign(outgoing[i]);
  }
}

}  // namespace mdgan
