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

#include <utility>

#include "mdgan/errors.hpp"
#include "mdgan/protocols.hpp"

namespace mdgan {

std::vector<double> average_parameters(
    const std::vector<std::vector<double>>& params) {
  if (params.empty()) throw ProtocolError("nothing to average");
  std::vector<double> sum = params.front();
  for (std::size_t p = 1; p < params.size(); ++p) {
    if (params[p].size() != sum.size()) {
      throw ShapeError("parameter vectors differ in length");
    }
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += params[p][i];
  }
  const double count = static_cast<double>(params.size());
  for (double& v : sum) v /= count;
  return sum;
}

FlGanProtocol::FlGanProtocol(FlGanConfig config, const Generator& generator,
                             const Discriminator& disc,
                             const std::vector<Shard>& shards)
    : config_(config), generator_(generator), disc_(disc) {
  if (shards.empty()) throw ConfigError("FL-GAN needs at least one worker");
  if (config_.round_period < 1) throw ConfigError("round period must be >= 1");
  if (config_.disc_steps < 1) {
    throw ConfigError("discriminator steps must be >= 1");
  }
  workers_.reserve(shards.size());
  for (const Shard& shard : shards) {
    if (shard.samples.rows() == 0) throw ConfigError("empty shard");
    workers_.push_back(
        {generator, disc, shard.samples,
         make_rng(config.seed, Stream::kNoise, shard.owner),
         make_rng(config.seed, Stream::kRealSamples, shard.owner), false});
  }
}

bool FlGanProtocol::round_boundary(std::int64_t iteration) const {
  return iteration % config_.round_period == 0;
}

void FlGanProtocol::server_send(SimContext& /*ctx*/) {}

void FlGanProtocol::worker_step(SimContext& ctx, std::size_t n) {
  FlGanWorkerState& state = workers_.at(n - 1);
  if (state.crashed) return;
  local_gan_iteration(state.gen, state.disc, state.shard, config_.batch_size,
                      config_.disc_steps, state.noise_rng, state.real_rng);
  if (round_boundary(ctx.iteration)) {
    ctx.network.send(make_message(
        NodeId::worker(n), NodeId::server(),
        GanUpload{state.gen.net.flatten(), state.disc.net.flatten()}));
  }
}

void FlGanProtocol::server_receive(SimContext& ctx) {
  if (!round_boundary(ctx.iteration)) return;
  std::vector<std::vector<double>> ws;
  std::vector<std::vector<double>> thetas;
  for (Message& msg : ctx.network.receive_all(NodeId::server())) {
    auto* up = std::get_if<GanUpload>(&msg.payload);
    if (up == nullptr) throw ProtocolError("server expected GAN uploads only");
    ws.push_back(std::move(up->w));
    thetas.push_back(std::move(up->theta));
  }
  const std::vector<std::size_t> alive = ctx.network.alive_workers();
  if (ws.size() != alive.size()) {
    throw ProtocolError("expected " + std::to_string(alive.size()) +
                        " uploads, received " + std::to_string(ws.size()));
  }
  const std::vector<double> w = average_parameters(ws);
  const std::vector<double> theta = average_parameters(thetas);
  generator_.net.assign(w);
  disc_.net.assign(theta);
  for (std::size_t n : alive) {
    ctx.network.send(make_message(NodeId::server(), NodeId::worker(n),
                                  GanParams{w, theta}));
  }
  ++rounds_;
}

void FlGanProtocol::peer_exchange(SimContext& ctx) {
  if (!round_boundary(ctx.iteration)) return;
  for (std::size_t n : ctx.network.alive_workers()) {
    std::vector<Message> inbox = ctx.network.receive_all(NodeId::worker(n));
    if (inbox.size() != 1 ||
        !std::holds_alternative<GanParams>(inbox.front().payload)) {
      throw ProtocolError("worker " + std::to_string(n) +
                          " expected exactly one parameter broadcast");
    }
    const auto& params = std::get<GanParams>(inbox.front().payload);
    workers_[n - 1].gen.net.assign(params.w);
    workers_[n - 1].disc.net.assign(params.theta);
  }
}

void FlGanProtocol::on_crash(std::size_t worker) {
  workers_.at(worker - 1).crashed = true;
}

}  // namespace mdgan
