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

#include "mdgan/cluster.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <sstream>

#include "mdgan/errors.hpp"

namespace mdgan {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::uint64_t tensor_scalars(const Tensor& t) {
  return static_cast<std::uint64_t>(t.size());
}

std::size_t class_slot(LinkClass link) { return static_cast<std::size_t>(link); }

std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::uint64_t parse_u64(std::string_view text) {
  std::uint64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("not an unsigned integer: '" + std::string(text) + "'");
  }
  return value;
}

}  // namespace

std::string to_string(NodeId node) {
  if (node.role == Role::kServer) return "C";
  return "W" + std::to_string(node.index);
}

std::string_view to_string(LinkClass link) {
  switch (link) {
    case LinkClass::kServerToWorker:
      return "C->W";
    case LinkClass::kWorkerToServer:
      return "W->C";
    case LinkClass::kWorkerToWorker:
      return "W->W";
  }
  return "?";
}

LinkClass parse_link_class(std::string_view text) {
  for (LinkClass link : kLinkClasses) {
    if (to_string(link) == text) return link;
  }
  throw FormatError("unknown link class '" + std::string(text) + "'");
}

LinkClass classify(NodeId src, NodeId dst) {
  if (src.role == Role::kServer && dst.role == Role::kWorker) {
    return LinkClass::kServerToWorker;
  }
  if (src.role == Role::kWorker && dst.role == Role::kServer) {
    return LinkClass::kWorkerToServer;
  }
  if (src.role == Role::kWorker && dst.role == Role::kWorker) {
    return LinkClass::kWorkerToWorker;
  }
  throw ConfigError("server-to-server links do not exist");
}

std::uint64_t scalar_count(const Payload& payload) {
  return std::visit(
      Overloaded{
          [](const GeneratedBatchPair& p) {
            return tensor_scalars(p.disc_batch) + tensor_scalars(p.gen_batch);
          },
          [](const Feedback& p) { return tensor_scalars(p.bundle.errors); },
          [](const DiscParams& p) {
            return static_cast<std::uint64_t>(p.theta.size());
          },
          [](const GanParams& p) {
            return static_cast<std::uint64_t>(p.w.size() + p.theta.size());
          },
          [](const GanUpload& p) {
            return static_cast<std::uint64_t>(p.w.size() + p.theta.size());
          },
      },
      payload);
}

Message make_message(NodeId src, NodeId dst, Payload payload) {
  const std::uint64_t bytes = scalar_count(payload) * kBytesPerScalar;
  return Message{src, dst, std::move(payload), bytes};
}

void TrafficLedger::record(std::int64_t iteration, NodeId src, NodeId dst,
                           std::uint64_t bytes) {
  const LinkClass link = classify(src, dst);
  entries_.push_back({iteration, src, dst, bytes});
  LinkTotals& t = totals_[class_slot(link)];
  t.bytes += bytes;
  t.messages += 1;
}

LinkTotals TrafficLedger::totals(LinkClass link) const {
  return totals_[class_slot(link)];
}

LedgerTotals TrafficLedger::totals() const {
  LedgerTotals out;
  for (LinkClass link : kLinkClasses) out[link] = totals(link);
  return out;
}

std::vector<LedgerRow> TrafficLedger::rows() const {
  struct Acc {
    std::uint64_t bytes = 0;
    std::uint64_t messages = 0;
    std::map<NodeId, std::uint64_t> ingress;
  };
  std::map<std::pair<std::int64_t, LinkClass>, Acc> acc;
  for (const Entry& e : entries_) {
    Acc& a = acc[{e.iteration, classify(e.src, e.dst)}];
    a.bytes += e.bytes;
    a.messages += 1;
    a.ingress[e.dst] += e.bytes;
  }
  std::vector<LedgerRow> out;
  out.reserve(acc.size());
  for (const auto& [key, a] : acc) {
    LedgerRow row{key.first, key.second, a.bytes, a.messages, 0, 0};
    for (const auto& [node, bytes] : a.ingress) {
      if (node.role == Role::kServer) {
        row.max_ingress_server = std::max(row.max_ingress_server, bytes);
      } else {
        row.max_ingress_worker = std::max(row.max_ingress_worker, bytes);
      }
    }
    out.push_back(row);
  }
  return out;
}

std::optional<std::int64_t> TrafficLedger::last_activity(NodeId node) const {
  std::optional<std::int64_t> last;
  for (const Entry& e : entries_) {
    if (e.src == node || e.dst == node) {
      last = std::max(last.value_or(e.iteration), e.iteration);
    }
  }
  return last;
}

void TrafficLedger::write_csv(std::ostream& out) const {
  out << "iteration,link_class,bytes,messages,max_ingress_server,"
         "max_ingress_worker\n";
  for (const LedgerRow& row : rows()) {
    out << row.iteration << ',' << to_string(row.link) << ',' << row.bytes
        << ',' << row.messages << ',' << row.max_ingress_server << ','
        << row.max_ingress_worker << '\n';
  }
}

LedgerTotals read_ledger_totals(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) ||
      line.rfind("iteration,link_class,bytes,messages", 0) != 0) {
    throw FormatError("ledger CSV header missing");
  }
  LedgerTotals totals;
  for (LinkClass link : kLinkClasses) totals[link] = {};
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 6) {
      throw FormatError("ledger CSV line " + std::to_string(line_no) +
                        " has " + std::to_string(fields.size()) + " fields");
    }
    LinkTotals& t = totals[parse_link_class(fields[1])];
    t.bytes += parse_u64(fields[2]);
    t.messages += parse_u64(fields[3]);
  }
  return totals;
}

Network::Network(std::size_t workers) : alive_(workers, true) {
  if (workers == 0) throw ConfigError("a cluster needs at least one worker");
}

void Network::check_node(NodeId node) const {
  if (node.role == Role::kServer) {
    if (node.index != 0) throw ConfigError("unknown node " + to_string(node));
    return;
  }
  if (node.index < 1 || node.index > alive_.size()) {
    throw ConfigError("unknown node " + to_string(node));
  }
}

bool Network::alive(NodeId node) const {
  check_node(node);
  return node.role == Role::kServer || alive_[node.index - 1];
}

std::size_t Network::alive_count() const {
  return static_cast<std::size_t>(
      std::count(alive_.begin(), alive_.end(), true));
}

std::vector<std::size_t> Network::alive_workers() const {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= alive_.size(); ++n) {
    if (alive_[n - 1]) out.push_back(n);
  }
  return out;
}

void Network::crash(std::size_t worker) {
  const NodeId node = NodeId::worker(worker);
  check_node(node);
  alive_[worker - 1] = false;
  for (auto& [link, queue] : links_) {
    if (link.first == node || link.second == node) {
      dropped_ += queue.size();
      queue.clear();
    }
  }
}

bool Network::send(Message message) {
  check_node(message.src);
  check_node(message.dst);
  if (!alive(message.src)) return false;
  ledger_.record(iteration_, message.src, message.dst, message.byte_size);
  ++sent_;
  if (!alive(message.dst)) {
    ++dropped_;
    return true;
  }
  const std::pair<NodeId, NodeId> link{message.src, message.dst};
  links_[link].push_back(std::move(message));
  return true;
}

std::vector<Message> Network::receive_all(NodeId dst) {
  check_node(dst);
  std::vector<Message> out;
  for (auto& [link, queue] : links_) {
    if (link.second != dst) continue;
    while (!queue.empty()) {
      out.push_back(std::move(queue.front()));
      queue.pop_front();
      ++delivered_;
    }
  }
  return out;
}

CrashSchedule CrashSchedule::every(std::size_t workers,
                                   std::int64_t iterations) {
  CrashSchedule schedule;
  for (std::size_t n = 1; n <= workers; ++n) {
    schedule.events.push_back(
        {n, static_cast<std::int64_t>(n) * iterations /
                static_cast<std::int64_t>(workers)});
  }
  return schedule;
}

void CrashSchedule::validate(std::size_t workers) const {
  std::set<std::size_t> seen;
  for (const CrashEvent& e : events) {
    if (e.worker < 1 || e.worker > workers) {
      throw ConfigError("crash schedule names unknown worker " +
                        std::to_string(e.worker));
    }
    if (e.iteration < 0) {
      throw ConfigError("crash iterations must be non-negative");
    }
    if (!seen.insert(e.worker).second) {
      throw ConfigError("worker " + std::to_string(e.worker) +
                        " is scheduled to crash twice");
    }
  }
}

std::vector<std::size_t> CrashSchedule::crashing_at(
    std::int64_t iteration) const {
  std::vector<std::size_t> out;
  for (const CrashEvent& e : events) {
    if (e.iteration == iteration) out.push_back(e.worker);
  }
  std::sort(out.begin(), out.end());
  return out;
}

RunResult run_global_iterations(Protocol& protocol, std::int64_t iterations,
                                const CrashSchedule& crashes,
                                const std::set<std::int64_t>& checkpoints,
                                const Scorer& scorer) {
  const std::size_t workers = protocol.worker_count();
  crashes.validate(workers);
  Network network(workers);
  RunResult result;

  const auto apply_crashes = [&](std::int64_t iteration) {
    for (std::size_t n : crashes.crashing_at(iteration)) {
      if (network.alive(NodeId::worker(n))) {
        network.crash(n);
        protocol.on_crash(n);
      }
    }
  };

  apply_crashes(0);
  for (std::int64_t i = 1; i <= iterations; ++i) {
    if (network.alive_count() == 0) {
      result.terminated_early = true;
      break;
    }
    network.set_iteration(i);
    SimContext ctx{network, i};
    protocol.server_send(ctx);
    for (std::size_t n : network.alive_workers()) protocol.worker_step(ctx, n);
    protocol.server_receive(ctx);
    protocol.peer_exchange(ctx);
    apply_crashes(i);
    result.completed_iterations = i;
    if (scorer && checkpoints.contains(i)) {
      result.metrics.push_back(scorer(protocol.server_generator(), i));
    }
  }
  if (iterations > 0 && result.completed_iterations < iterations) {
    result.terminated_early = true;
  }
  result.ledger = network.ledger();
  result.messages_sent = network.sent_count();
  result.messages_delivered = network.delivered_count();
  result.messages_dropped = network.dropped_count();
  return result;
}

}  // namespace mdgan
