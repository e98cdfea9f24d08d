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

#include "mdgan/cost.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

#include "mdgan/errors.hpp"

namespace mdgan {

namespace {

double as_double(std::uint64_t v) { return static_cast<double>(v); }

void fill_links(CostReport& report) {
  const CostModelInput& in = report.input;
  const std::uint64_t n = in.workers;
  switch (report.protocol) {
    case ProtocolKind::kStandalone:
      break;
    case ProtocolKind::kMdGan: {
      const std::uint64_t bd = in.batch_size * in.data_dim;
      const std::uint64_t it = in.iterations;
      const std::uint64_t swaps = n >= 2 ? in.periods() : 0;
      report.links = {
          {"C->W (C)", LinkClass::kServerToWorker, Role::kServer, 2 * bd * n, it},
          {"C->W (W)", LinkClass::kServerToWorker, Role::kWorker, 2 * bd, it},
          {"W->C (W)", LinkClass::kWorkerToServer, Role::kWorker, bd, it},
          {"W->C (C)", LinkClass::kWorkerToServer, Role::kServer, bd * n, it},
          {"W->W (W)", LinkClass::kWorkerToWorker, Role::kWorker,
           in.disc_params, swaps},
      };
      report.server_worker_communications = it;
      report.worker_worker_communications = swaps;
      break;
    }
    case ProtocolKind::kFlGan: {
      const std::uint64_t model = in.gen_params + in.disc_params;
      const std::uint64_t rounds = in.periods();
      report.links = {
          {"C->W (C)", LinkClass::kServerToWorker, Role::kServer, n * model,
           rounds},
          {"C->W (W)", LinkClass::kServerToWorker, Role::kWorker, model, rounds},
          {"W->C (W)", LinkClass::kWorkerToServer, Role::kWorker, model, rounds},
          {"W->C (C)", LinkClass::kWorkerToServer, Role::kServer, n * model,
           rounds},
      };
      report.server_worker_communications = rounds;
      break;
    }
  }
}

void fill_complexity(CostReport& report) {
  const CostModelInput& in = report.input;
  const double i = as_double(in.iterations), b = as_double(in.batch_size),
               n = as_double(in.workers), d = as_double(in.data_dim),
               w = as_double(in.gen_params), t = as_double(in.disc_params),
               m = as_double(in.shard_size), e = as_double(in.epochs),
               k = as_double(in.k);
  switch (report.protocol) {
    case ProtocolKind::kStandalone:
      report.complexity = {
          {"Computation", "I b (|w| + |theta|)", i * b * (w + t)},
          {"Memory", "|w| + |theta|", w + t},
      };
      break;
    case ProtocolKind::kFlGan:
      report.complexity = {
          {"Computation C", "I b N (|w| + |theta|) / (m E)",
           i * b * n * (w + t) / (m * e)},
          {"Memory C", "N (|w| + |theta|)", n * (w + t)},
          {"Computation W", "I b (|w| + |theta|)", i * b * (w + t)},
          {"Memory W", "|w| + |theta|", w + t},
      };
      break;
    case ProtocolKind::kMdGan:
      report.complexity = {
          {"Computation C", "I b (d N + k |w|)", i * b * (d * n + k * w)},
          {"Memory C", "b (d N + k |w|)", b * (d * n + k * w)},
          {"Computation W", "I b |theta|", i * b * t},
          {"Memory W", "|theta|", t},
      };
      break;
  }
}

// Closed form for a crash-free run.
LedgerTotals predict_without_crashes(const CostReport& report) {
  const CostModelInput& in = report.input;
  const std::uint64_t n = in.workers, bps = in.bytes_per_scalar;
  LedgerTotals out;
  for (LinkClass link : kLinkClasses) out[link] = {};
  switch (report.protocol) {
    case ProtocolKind::kStandalone:
      break;
    case ProtocolKind::kMdGan: {
      const std::uint64_t bd = in.batch_size * in.data_dim;
      const std::uint64_t swaps = report.worker_worker_communications;
      out[LinkClass::kServerToWorker] = {2 * bd * n * in.iterations * bps,
                                         n * in.iterations};
      out[LinkClass::kWorkerToServer] = {bd * n * in.iterations * bps,
                                         n * in.iterations};
      out[LinkClass::kWorkerToWorker] = {in.disc_params * n * swaps * bps,
                                         n * swaps};
      break;
    }
    case ProtocolKind::kFlGan: {
      const std::uint64_t model = in.gen_params + in.disc_params;
      const std::uint64_t rounds = report.server_worker_communications;
      out[LinkClass::kServerToWorker] = {n * model * rounds * bps, n * rounds};
      out[LinkClass::kWorkerToServer] = {n * model * rounds * bps, n * rounds};
      break;
    }
  }
  return out;
}

// Walks the iterations with the alive count the simulator would see.
LedgerTotals predict_with_crashes(const CostReport& report,
                                  const CrashSchedule& crashes) {
  const CostModelInput& in = report.input;
  const std::uint64_t bps = in.bytes_per_scalar;
  const std::uint64_t period = in.period();
  LedgerTotals out;
  for (LinkClass link : kLinkClasses) out[link] = {};
  std::uint64_t alive = in.workers;
  const auto crash_count = [&](std::int64_t iteration) {
    return static_cast<std::uint64_t>(crashes.crashing_at(iteration).size());
  };
  alive -= crash_count(0);
  for (std::uint64_t i = 1; i <= in.iterations && alive > 0; ++i) {
    const bool boundary = i % period == 0;
    if (report.protocol == ProtocolKind::kMdGan) {
      const std::uint64_t bd = in.batch_size * in.data_dim;
      out[LinkClass::kServerToWorker].bytes += 2 * bd * alive * bps;
      out[LinkClass::kServerToWorker].messages += alive;
      out[LinkClass::kWorkerToServer].bytes += bd * alive * bps;
      out[LinkClass::kWorkerToServer].messages += alive;
      if (boundary && alive >= 2) {
        out[LinkClass::kWorkerToWorker].bytes += in.disc_params * alive * bps;
        out[LinkClass::kWorkerToWorker].messages += alive;
      }
    } else if (report.protocol == ProtocolKind::kFlGan && boundary) {
      const std::uint64_t model = in.gen_params + in.disc_params;
      for (LinkClass link :
           {LinkClass::kServerToWorker, LinkClass::kWorkerToServer}) {
        out[link].bytes += model * alive * bps;
        out[link].messages += alive;
      }
    }
    alive -= std::min(alive, crash_count(static_cast<std::int64_t>(i)));
  }
  return out;
}

std::string format_bytes(std::uint64_t bytes) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2)
      << static_cast<double>(bytes) / 1e6 << " MB";
  return out.str();
}

}  // namespace

std::string_view to_string(ProtocolKind protocol) {
  switch (protocol) {
    case ProtocolKind::kStandalone:
      return "standalone";
    case ProtocolKind::kFlGan:
      return "flgan";
    case ProtocolKind::kMdGan:
      return "mdgan";
  }
  return "?";
}

ProtocolKind parse_protocol(std::string_view text) {
  if (text == "standalone") return ProtocolKind::kStandalone;
  if (text == "flgan") return ProtocolKind::kFlGan;
  if (text == "mdgan") return ProtocolKind::kMdGan;
  throw ConfigError("unknown protocol '" + std::string(text) +
                    "' (expected standalone, flgan or mdgan)");
}

void CostModelInput::validate() const {
  const std::pair<const char*, std::uint64_t> fields[] = {
      {"workers", workers},       {"batch_size", batch_size},
      {"data_dim", data_dim},     {"gen_params", gen_params},
      {"disc_params", disc_params}, {"iterations", iterations},
      {"shard_size", shard_size}, {"epochs", epochs},
      {"k", k},                   {"bytes_per_scalar", bytes_per_scalar}};
  for (const auto& [name, value] : fields) {
    if (value == 0) {
      throw ConfigError(std::string("cost model field ") + name +
                        " must be positive");
    }
  }
  if (k > workers) throw ConfigError("cost model needs k <= N");
}

std::uint64_t CostModelInput::period() const {
  return std::max<std::uint64_t>(1, shard_size * epochs / batch_size);
}

std::uint64_t CostModelInput::periods() const { return iterations / period(); }

CostReport analytic_costs(const CostModelInput& input, ProtocolKind protocol) {
  input.validate();
  CostReport report;
  report.protocol = protocol;
  report.input = input;
  fill_links(report);
  fill_complexity(report);
  report.predicted = predict_without_crashes(report);
  return report;
}

CostReport analytic_costs(const CostModelInput& input, ProtocolKind protocol,
                          const CrashSchedule& crashes) {
  CostReport report = analytic_costs(input, protocol);
  if (!crashes.events.empty()) {
    crashes.validate(input.workers);
    report.predicted = predict_with_crashes(report, crashes);
  }
  return report;
}

std::vector<IngressPoint> ingress_curve(
    const CostModelInput& input, std::span<const std::uint64_t> batch_sizes) {
  const std::uint64_t bps = input.bytes_per_scalar;
  const std::uint64_t model = input.gen_params + input.disc_params;
  std::vector<IngressPoint> out;
  out.reserve(batch_sizes.size());
  for (std::uint64_t b : batch_sizes) {
    if (b == 0) throw ConfigError("batch sizes must be positive");
    out.push_back({b, model * bps, input.workers * model * bps,
                   2 * b * input.data_dim * bps,
                   b * input.data_dim * input.workers * bps,
                   input.disc_params * bps});
  }
  return out;
}

std::uint64_t worker_ingress_crossover(const CostModelInput& input) {
  // Smallest b with 2 b d > |w| + |theta|.
  return (input.gen_params + input.disc_params) / (2 * input.data_dim) + 1;
}

std::uint64_t server_ingress_crossover(const CostModelInput& input) {
  // Smallest b with b d N > N (|w| + |theta|).
  return (input.gen_params + input.disc_params) / input.data_dim + 1;
}

VerifyResult verify_ledger(const CostReport& report,
                           const LedgerTotals& measured) {
  VerifyResult result;
  for (LinkClass link : kLinkClasses) {
    const auto p = report.predicted.find(link);
    const auto m = measured.find(link);
    const LinkTotals predicted = p == report.predicted.end() ? LinkTotals{}
                                                              : p->second;
    const LinkTotals actual = m == measured.end() ? LinkTotals{} : m->second;
    if (predicted.bytes != actual.bytes) {
      std::ostringstream msg;
      msg << to_string(link) << " bytes: predicted " << predicted.bytes
          << ", measured " << actual.bytes;
      result.diffs.push_back(msg.str());
    }
    if (predicted.messages != actual.messages) {
      std::ostringstream msg;
      msg << to_string(link) << " messages: predicted " << predicted.messages
          << ", measured " << actual.messages;
      result.diffs.push_back(msg.str());
    }
  }
  result.ok = result.diffs.empty();
  return result;
}

VerifyResult verify_ledger(const CostReport& report,
                           const TrafficLedger& ledger) {
  return verify_ledger(report, ledger.totals());
}

void write_cost_table(std::ostream& out, const CostReport& report) {
  const CostModelInput& in = report.input;
  out << "protocol: " << to_string(report.protocol) << "\n"
      << "N=" << in.workers << " b=" << in.batch_size << " d=" << in.data_dim
      << " |w|=" << in.gen_params << " |theta|=" << in.disc_params
      << " I=" << in.iterations << " m=" << in.shard_size
      << " E=" << in.epochs << " k=" << in.k
      << " bytes/scalar=" << in.bytes_per_scalar << "\n\n";
  out << std::left << std::setw(12) << "link" << std::right << std::setw(16)
      << "scalars/comm" << std::setw(14) << "per comm" << std::setw(10)
      << "count" << std::setw(20) << "total bytes" << "\n";
  for (const LinkCost& link : report.links) {
    out << std::left << std::setw(12) << link.label << std::right
        << std::setw(16) << link.scalars_per_communication << std::setw(14)
        << format_bytes(report.per_communication_bytes(link)) << std::setw(10)
        << link.communications << std::setw(20) << report.bytes(link) << "\n";
  }
  out << "\nTotal # C<->W: " << report.server_worker_communications << "\n";
  if (report.protocol == ProtocolKind::kMdGan) {
    out << "Total # W<->W: " << report.worker_worker_communications << "\n";
  }
  out << "\n";
  for (const ComplexityEntry& c : report.complexity) {
    out << std::left << std::setw(16) << c.label << std::setw(34)
        << ("O(" + c.expression + ")") << std::right << std::setprecision(6)
        << c.value << "\n";
  }
  out << "\npredicted ledger totals:\n";
  for (const auto& [link, totals] : report.predicted) {
    out << "  " << to_string(link) << ": " << totals.bytes << " bytes in "
        << totals.messages << " messages\n";
  }
}

void write_cost_csv(std::ostream& out, const CostReport& report) {
  out << "protocol,link,scalars_per_communication,bytes_per_communication,"
         "communications,total_bytes\n";
  for (const LinkCost& link : report.links) {
    out << to_string(report.protocol) << ',' << link.label << ','
        << link.scalars_per_communication << ','
        << report.per_communication_bytes(link) << ',' << link.communications
        << ',' << report.bytes(link) << '\n';
  }
}

void write_ingress_table(std::ostream& out,
                         const std::vector<IngressPoint>& curve) {
  out << "batch_size,flgan_worker,flgan_server,mdgan_worker,mdgan_server,"
         "mdgan_swap_worker\n";
  for (const IngressPoint& p : curve) {
    out << p.batch_size << ',' << p.flgan_worker << ',' << p.flgan_server
        << ',' << p.mdgan_worker << ',' << p.mdgan_server << ','
        << p.mdgan_swap_worker << '\n';
  }
}

}  // namespace mdgan
