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

// mdgan: run experiments, print cost models, and check ledgers.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mdgan/config.hpp"
#include "mdgan/cost.hpp"
#include "mdgan/errors.hpp"
#include "mdgan/experiment.hpp"

namespace {

using mdgan::CostModelInput;
using mdgan::ProtocolKind;

std::string dashed(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return key;
}

void add_cost_flags(CLI::App& cmd, CostModelInput& in) {
  cmd.add_option("--workers", in.workers, "N")->capture_default_str();
  cmd.add_option("--batch-size", in.batch_size, "b")->capture_default_str();
  cmd.add_option("--data-dim", in.data_dim, "d")->capture_default_str();
  cmd.add_option("--gen-params", in.gen_params, "|w|")->capture_default_str();
  cmd.add_option("--disc-params", in.disc_params, "|theta|")
      ->capture_default_str();
  cmd.add_option("--iterations", in.iterations, "I")->capture_default_str();
  cmd.add_option("--shard-size", in.shard_size, "m")->capture_default_str();
  cmd.add_option("--epochs", in.epochs, "E")->capture_default_str();
  cmd.add_option("--k", in.k, "generated batches per iteration")
      ->capture_default_str();
  cmd.add_option("--bytes-per-scalar", in.bytes_per_scalar)
      ->capture_default_str();
}

std::vector<ProtocolKind> protocols_for(const std::string& which) {
  if (which == "both") return {ProtocolKind::kMdGan, ProtocolKind::kFlGan};
  return {mdgan::parse_protocol(which)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MD-GAN / FL-GAN training simulator"};
  app.require_subcommand(1);

  // run
  CLI::App* run = app.add_subcommand("run", "train and write artifacts");
  std::string config_path;
  std::map<std::string, std::string> overrides;
  run->add_option("--config", config_path, "key = value config file")
      ->check(CLI::ExistingFile);
  for (const std::string& key : mdgan::ExperimentConfig::keys()) {
    CLI::Option* opt =
        run->add_option_function<std::string>(
            "--" + dashed(key),
            [&overrides, key](const std::string& v) { overrides[key] = v; },
            "overrides config key " + key);
    if (key == "seed") opt->required();
  }

  // cost
  CLI::App* cost = app.add_subcommand("cost", "analytic traffic and workload");
  CostModelInput cost_in;
  cost_in.workers = 10;
  cost_in.batch_size = 10;
  cost_in.data_dim = 2;
  cost_in.iterations = 10000;
  cost_in.shard_size = 800;
  std::string cost_protocol = "both";
  bool cost_csv = false;
  add_cost_flags(*cost, cost_in);
  cost->add_option("--protocol", cost_protocol, "mdgan | flgan | both")
      ->check(CLI::IsMember({"mdgan", "flgan", "both"}))
      ->capture_default_str();
  cost->add_flag("--csv", cost_csv, "CSV instead of a text table");

  // ingress
  CLI::App* ingress =
      app.add_subcommand("ingress", "maximal ingress per communication vs b");
  CostModelInput ingress_in = cost_in;
  std::vector<std::uint64_t> batch_sizes{1, 10, 100, 1000, 10000};
  add_cost_flags(*ingress, ingress_in);
  ingress->add_option("--batch-sizes", batch_sizes)
      ->delimiter(',')
      ->capture_default_str();

  // verify
  CLI::App* verify =
      app.add_subcommand("verify", "compare a ledger with the cost model");
  std::string verify_config;
  std::string verify_ledger_path;
  verify->add_option("--config", verify_config, "config.resolved of the run")
      ->required()
      ->check(CLI::ExistingFile);
  verify->add_option("--ledger", verify_ledger_path, "ledger.csv of the run")
      ->required()
      ->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      mdgan::ExperimentConfig config;
      if (!config_path.empty()) config = mdgan::load_config(config_path);
      for (const auto& [key, value] : overrides) config.set(key, value);
      const auto result = mdgan::run_experiment(config, std::cout);
      return result.failed ? 3 : 0;
    }
    if (cost->parsed()) {
      for (ProtocolKind p : protocols_for(cost_protocol)) {
        const auto report = mdgan::analytic_costs(cost_in, p);
        if (cost_csv) {
          mdgan::write_cost_csv(std::cout, report);
        } else {
          mdgan::write_cost_table(std::cout, report);
          std::cout << "\n";
        }
      }
      return 0;
    }
    if (ingress->parsed()) {
      ingress_in.validate();
      mdgan::write_ingress_table(
          std::cout, mdgan::ingress_curve(ingress_in, batch_sizes));
      std::cout << "worker crossover b* = "
                << mdgan::worker_ingress_crossover(ingress_in)
                << "\nserver crossover b* = "
                << mdgan::server_ingress_crossover(ingress_in) << "\n";
      return 0;
    }
    if (verify->parsed()) {
      const auto config = mdgan::load_config(verify_config);
      config.validate();
      const auto dataset = mdgan::load_dataset(config);
      const auto report =
          mdgan::analytic_costs(mdgan::cost_input_for(config, dataset),
                                config.protocol, config.crash_schedule());
      std::ifstream ledger(verify_ledger_path);
      const auto result =
          mdgan::verify_ledger(report, mdgan::read_ledger_totals(ledger));
      for (const std::string& diff : result.diffs) std::cout << diff << "\n";
      std::cout << (result.ok ? "ledger matches the cost model\n"
                              : "ledger does NOT match the cost model\n");
      return result.ok ? 0 : 1;
    }
  } catch (const mdgan::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
