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

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mdgan/cluster.hpp"
#include "mdgan/config.hpp"
#include "mdgan/cost.hpp"
#include "mdgan/data.hpp"
#include "mdgan/gan.hpp"
#include "mdgan/protocols.hpp"

namespace mdgan {

struct ExperimentResult {
  MetricsSeries metrics;
  TrafficLedger ledger;
  CostReport cost;
  std::vector<AggregationRecord> aggregation;  // MD-GAN only
  Generator generator;                         // server-side, final
  std::int64_t completed_iterations = 0;
  bool terminated_early = false;
  bool failed = false;
  std::string failure;
};

Dataset load_dataset(const ExperimentConfig& config);

CostModelInput cost_input_for(const ExperimentConfig& config,
                              const Dataset& dataset);

// Runs the configured protocol in memory. Requires config.seed. A numeric
// failure mid-run is caught and reported through `failed`, with the metrics
// recorded so far kept.
ExperimentResult execute_experiment(const ExperimentConfig& config);

// execute_experiment() plus artifacts in config.output_dir: metrics.csv,
// ledger.csv, cost_report.txt, cost_report.csv, config.resolved, and a
// FAILED marker when the run did not finish.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                std::ostream& log);

}  // namespace mdgan
