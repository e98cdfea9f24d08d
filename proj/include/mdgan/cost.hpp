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

// Closed-form communication and workload model for MD-GAN and FL-GAN, and
// its cross-check against a simulated traffic ledger.
//
// Scalar counts are exact integers; bytes are scalars * bytes_per_scalar.
// Per iteration, MD-GAN moves 2bd scalars to each worker and bd scalars back,
// and each swap moves |theta| scalars per worker. FL-GAN moves |w| + |theta|
// scalars per worker in each direction once per round. Swaps and rounds
// happen every floor(mE / b) iterations.

#pragma once

#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdgan/cluster.hpp"

namespace mdgan {

enum class ProtocolKind { kStandalone, kFlGan, kMdGan };

std::string_view to_string(ProtocolKind protocol);
ProtocolKind parse_protocol(std::string_view text);

struct CostModelInput {
  std::uint64_t workers = 1;      // N
  std::uint64_t batch_size = 1;   // b
  std::uint64_t data_dim = 1;     // d
  std::uint64_t gen_params = 1;   // |w|
  std::uint64_t disc_params = 1;  // |theta|
  std::uint64_t iterations = 1;   // I
  std::uint64_t shard_size = 1;   // m
  std::uint64_t epochs = 1;       // E
  std::uint64_t k = 1;
  std::uint64_t bytes_per_scalar = kBytesPerScalar;

  void validate() const;
  std::uint64_t period() const;   // iterations between swaps / rounds
  std::uint64_t periods() const;  // swaps (MD-GAN) or rounds (FL-GAN)
};

struct LinkCost {
  std::string label;  // e.g. "C->W (C)"
  LinkClass link = LinkClass::kServerToWorker;
  Role measured_at = Role::kServer;
  std::uint64_t scalars_per_communication = 0;
  std::uint64_t communications = 0;

  std::uint64_t total_scalars() const {
    return scalars_per_communication * communications;
  }
};

struct ComplexityEntry {
  std::string label;       // e.g. "Computation C"
  std::string expression;  // big-O argument, symbolic
  double value = 0.0;      // expression instantiated
};

struct CostReport {
  ProtocolKind protocol = ProtocolKind::kMdGan;
  CostModelInput input;
  std::vector<LinkCost> links;
  std::vector<ComplexityEntry> complexity;
  std::uint64_t server_worker_communications = 0;  // total # C<->W
  std::uint64_t worker_worker_communications = 0;  // total # W<->W
  // What a simulation of this configuration must record, per link class.
  LedgerTotals predicted;

  std::uint64_t bytes(const LinkCost& link) const {
    return link.total_scalars() * input.bytes_per_scalar;
  }
  std::uint64_t per_communication_bytes(const LinkCost& link) const {
    return link.scalars_per_communication * input.bytes_per_scalar;
  }
};

CostReport analytic_costs(const CostModelInput& input, ProtocolKind protocol);

// Same report, with `predicted` adjusted for workers that stop sending after
// their scheduled crash.
CostReport analytic_costs(const CostModelInput& input, ProtocolKind protocol,
                          const CrashSchedule& crashes);

struct IngressPoint {
  std::uint64_t batch_size = 0;
  std::uint64_t flgan_worker = 0;  // bytes per communication
  std::uint64_t flgan_server = 0;
  std::uint64_t mdgan_worker = 0;
  std::uint64_t mdgan_server = 0;
  std::uint64_t mdgan_swap_worker = 0;
};

// Maximal ingress per communication for each batch size; `input.batch_size`
// is ignored.
std::vector<IngressPoint> ingress_curve(
    const CostModelInput& input, std::span<const std::uint64_t> batch_sizes);

// Smallest batch size at which an MD-GAN worker (resp. the server) receives
// more per communication than under FL-GAN.
std::uint64_t worker_ingress_crossover(const CostModelInput& input);
std::uint64_t server_ingress_crossover(const CostModelInput& input);

struct VerifyResult {
  bool ok = true;
  std::vector<std::string> diffs;
};

VerifyResult verify_ledger(const CostReport& report,
                           const LedgerTotals& measured);
VerifyResult verify_ledger(const CostReport& report,
                           const TrafficLedger& ledger);

void write_cost_table(std::ostream& out, const CostReport& report);
void write_cost_csv(std::ostream& out, const CostReport& report);
void write_ingress_table(std::ostream& out,
                         const std::vector<IngressPoint>& curve);

}  // namespace mdgan
