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

#include "mdgan/experiment.hpp"

#include <filesystem>
#include <fstream>

#include "mdgan/errors.hpp"
#include "mdgan/metrics.hpp"

namespace mdgan {

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + path.string());
  return out;
}

}  // namespace

Dataset load_dataset(const ExperimentConfig& config) {
  if (config.dataset == "idx") return load_idx(config.idx_path);
  return make_ring(config.ring, config.seed.value_or(0));
}

CostModelInput cost_input_for(const ExperimentConfig& config,
                              const Dataset& dataset) {
  const std::size_t d = dataset.dim();
  std::vector<std::size_t> gen_dims{config.noise_dim};
  gen_dims.insert(gen_dims.end(), config.gen_shape.hidden.begin(),
                  config.gen_shape.hidden.end());
  gen_dims.push_back(d);
  std::vector<std::size_t> disc_dims{d};
  disc_dims.insert(disc_dims.end(), config.disc_shape.hidden.begin(),
                   config.disc_shape.hidden.end());
  disc_dims.push_back(1);

  const bool distributed = config.protocol != ProtocolKind::kStandalone;
  const std::size_t workers = distributed ? config.workers : 1;
  CostModelInput in;
  in.workers = workers;
  in.batch_size = config.batch_size;
  in.data_dim = d;
  in.gen_params = mlp_param_count(gen_dims);
  in.disc_params = mlp_param_count(disc_dims);
  in.iterations = static_cast<std::uint64_t>(std::max<std::int64_t>(
      1, config.iterations));
  in.shard_size = std::max<std::size_t>(1, dataset.size() / workers);
  in.epochs = config.epochs;
  in.k = distributed ? config.resolved_k() : 1;
  return in;
}

ExperimentResult execute_experiment(const ExperimentConfig& config) {
  config.validate();
  if (!config.seed) throw ConfigError("a seed is required");
  const std::uint64_t seed = *config.seed;

  const Dataset dataset = load_dataset(config);
  const std::size_t d = dataset.dim();
  Rng gen_init = make_rng(seed, Stream::kGeneratorInit);
  Rng disc_init = make_rng(seed, Stream::kDiscriminatorInit);
  Generator generator = make_generator(config.noise_dim, d, config.gen_shape,
                                       config.gen_adam, gen_init);
  Discriminator disc = make_discriminator(d, config.disc_shape,
                                          config.disc_adam, disc_init);

  const CostModelInput cost_input = cost_input_for(config, dataset);
  const CrashSchedule crashes = config.crash_schedule();

  ExperimentResult result;
  result.cost = config.protocol == ProtocolKind::kStandalone
                    ? analytic_costs(cost_input, config.protocol)
                    : analytic_costs(cost_input, config.protocol, crashes);

  const ScoreOptions options{config.score_samples, config.mode_threshold};
  const Scorer base_scorer = make_scorer(dataset, options, seed);
  const Scorer scorer = [&](const Generator& g, std::int64_t iteration) {
    MetricsRow row = base_scorer(g, iteration);
    result.metrics.push_back(row);
    return row;
  };
  const std::set<std::int64_t> checkpoints = config.checkpoints();

  try {
    if (config.protocol == ProtocolKind::kStandalone) {
      StandaloneConfig sc;
      sc.batch_size = config.batch_size;
      sc.iterations = config.iterations;
      sc.disc_steps = config.disc_steps;
      sc.checkpoints = checkpoints;
      sc.seed = seed;
      standalone_train(generator, disc, dataset.samples, sc, scorer);
      result.completed_iterations = config.iterations;
      result.generator = generator;
      return result;
    }

    const std::vector<Shard> shards = shard_iid(dataset, config.workers, seed);
    const std::int64_t period = static_cast<std::int64_t>(cost_input.period());
    RunResult run;
    if (config.protocol == ProtocolKind::kMdGan) {
      MdGanConfig mc;
      mc.k = config.resolved_k();
      mc.batch_size = config.batch_size;
      mc.disc_steps = config.disc_steps;
      mc.swap_period = period;
      mc.seed = seed;
      MdGanProtocol protocol(mc, generator, disc, shards);
      run = run_global_iterations(protocol, config.iterations, crashes,
                                  checkpoints, scorer);
      result.aggregation = protocol.aggregation_trace();
      result.generator = protocol.server_generator();
    } else {
      FlGanConfig fc;
      fc.batch_size = config.batch_size;
      fc.disc_steps = config.disc_steps;
      fc.round_period = period;
      fc.seed = seed;
      FlGanProtocol protocol(fc, generator, disc, shards);
      run = run_global_iterations(protocol, config.iterations, crashes,
                                  checkpoints, scorer);
      result.generator = protocol.server_generator();
    }
    result.ledger = std::move(run.ledger);
    result.completed_iterations = run.completed_iterations;
    result.terminated_early = run.terminated_early;
  } catch (const NumericError& e) {
    result.failed = true;
    result.failure = e.what();
  }
  return result;
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream& log) {
  namespace fs = std::filesystem;
  config.validate();
  const fs::path dir(config.output_dir);
  fs::create_directories(dir);
  {
    std::ofstream out = open_output(dir / "config.resolved");
    out << config.to_text();
  }
  fs::remove(dir / "FAILED");

  log << "running " << to_string(config.protocol) << " for "
      << config.iterations << " iterations\n";
  ExperimentResult result = execute_experiment(config);

  {
    std::ofstream out = open_output(dir / "metrics.csv");
    write_metrics_csv(out, result.metrics);
  }
  {
    std::ofstream out = open_output(dir / "ledger.csv");
    result.ledger.write_csv(out);
  }
  {
    std::ofstream out = open_output(dir / "cost_report.txt");
    write_cost_table(out, result.cost);
  }
  {
    std::ofstream out = open_output(dir / "cost_report.csv");
    write_cost_csv(out, result.cost);
  }
  if (result.failed) {
    std::ofstream out = open_output(dir / "FAILED");
    out << result.failure << "\n";
    log << "run failed: " << result.failure << "\n";
  } else {
    log << "completed " << result.completed_iterations << " iterations";
    if (result.terminated_early) log << " (every worker crashed)";
    log << "; artifacts in " << dir.string() << "\n";
  }
  return result;
}

}  // namespace mdgan
