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

// Deterministic single-process cluster: one server, N workers, FIFO links,
// a byte-exact traffic ledger and fail-stop crash injection.
//
// Payloads travel at full double precision; the ledger charges
// kBytesPerScalar bytes for every scalar they carry, without headers.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "mdgan/gan.hpp"
#include "mdgan/metrics_row.hpp"
#include "mdgan/nn.hpp"

namespace mdgan {

inline constexpr std::uint64_t kBytesPerScalar = 4;

enum class Role { kServer, kWorker };

struct NodeId {
  Role role = Role::kServer;
  std::size_t index = 0;  // 0 for the server, 1..N for workers

  static NodeId server() { return {Role::kServer, 0}; }
  static NodeId worker(std::size_t n) { return {Role::kWorker, n}; }

  auto operator<=>(const NodeId&) const = default;
};

std::string to_string(NodeId node);

enum class LinkClass { kServerToWorker = 0, kWorkerToServer = 1,
                       kWorkerToWorker = 2 };
inline constexpr std::array<LinkClass, 3> kLinkClasses = {
    LinkClass::kServerToWorker, LinkClass::kWorkerToServer,
    LinkClass::kWorkerToWorker};

std::string_view to_string(LinkClass link);
LinkClass parse_link_class(std::string_view text);
// Throws ConfigError for server-to-server links.
LinkClass classify(NodeId src, NodeId dst);

// MD-GAN: the two generated batches a worker trains on.
struct GeneratedBatchPair {
  Tensor disc_batch;  // X_d, trains the discriminator
  Tensor gen_batch;   // X_g, the batch feedback is computed on
};
struct Feedback {
  FeedbackBundle bundle;
};
// MD-GAN swap: discriminator parameters only, no optimizer state.
struct DiscParams {
  std::vector<double> theta;
};
// FL-GAN server broadcast of averaged parameters.
struct GanParams {
  std::vector<double> w;
  std::vector<double> theta;
};
// FL-GAN worker upload at the end of a round.
struct GanUpload {
  std::vector<double> w;
  std::vector<double> theta;
};

using Payload =
    std::variant<GeneratedBatchPair, Feedback, DiscParams, GanParams, GanUpload>;

std::uint64_t scalar_count(const Payload& payload);

struct Message {
  NodeId src;
  NodeId dst;
  Payload payload;
  std::uint64_t byte_size = 0;
};

Message make_message(NodeId src, NodeId dst, Payload payload);

struct LinkTotals {
  std::uint64_t bytes = 0;
  std::uint64_t messages = 0;

  bool operator==(const LinkTotals&) const = default;
};

using LedgerTotals = std::map<LinkClass, LinkTotals>;

// One row of the exported ledger: traffic of one link class during one
// global iteration.
struct LedgerRow {
  std::int64_t iteration = 0;
  LinkClass link = LinkClass::kServerToWorker;
  std::uint64_t bytes = 0;
  std::uint64_t messages = 0;
  std::uint64_t max_ingress_server = 0;
  std::uint64_t max_ingress_worker = 0;

  bool operator==(const LedgerRow&) const = default;
};

class TrafficLedger {
 public:
  struct Entry {
    std::int64_t iteration;
    NodeId src;
    NodeId dst;
    std::uint64_t bytes;

    bool operator==(const Entry&) const = default;
  };

  void record(std::int64_t iteration, NodeId src, NodeId dst,
              std::uint64_t bytes);

  LinkTotals totals(LinkClass link) const;
  LedgerTotals totals() const;
  const std::vector<Entry>& entries() const { return entries_; }

  // Aggregated per (iteration, link class), in iteration then class order.
  std::vector<LedgerRow> rows() const;

  // Last iteration in which `node` sent or received anything, if ever.
  std::optional<std::int64_t> last_activity(NodeId node) const;

  // iteration,link_class,bytes,messages,max_ingress_server,max_ingress_worker
  void write_csv(std::ostream& out) const;

  bool operator==(const TrafficLedger&) const = default;

 private:
  std::vector<Entry> entries_;
  std::array<LinkTotals, 3> totals_{};
};

// Sums a ledger CSV back into per-class totals. Throws FormatError.
LedgerTotals read_ledger_totals(std::istream& in);

class Network {
 public:
  explicit Network(std::size_t workers);

  std::size_t worker_count() const { return alive_.size(); }
  bool alive(NodeId node) const;
  std::size_t alive_count() const;
  std::vector<std::size_t> alive_workers() const;

  // Fail-stop: the worker never sends or receives again and anything queued
  // to or from it is dropped.
  void crash(std::size_t worker);

  void set_iteration(std::int64_t iteration) { iteration_ = iteration; }
  std::int64_t iteration() const { return iteration_; }

  // Enqueues on the (src, dst) link and charges the ledger. A crashed source
  // is rejected (returns false, ledger untouched); a crashed destination is
  // charged and then dropped. Unknown nodes throw ConfigError.
  bool send(Message message);

  // Everything queued for `dst`, grouped by source in node order and FIFO
  // within each link.
  std::vector<Message> receive_all(NodeId dst);

  const TrafficLedger& ledger() const { return ledger_; }
  std::uint64_t sent_count() const { return sent_; }
  std::uint64_t delivered_count() const { return delivered_; }
  std::uint64_t dropped_count() const { return dropped_; }

 private:
  void check_node(NodeId node) const;

  std::vector<bool> alive_;  // index n - 1 for worker n
  std::map<std::pair<NodeId, NodeId>, std::deque<Message>> links_;
  TrafficLedger ledger_;
  std::int64_t iteration_ = 0;
  std::uint64_t sent_ = 0;
  std::uint64_t delivered_ = 0;
  std::uint64_t dropped_ = 0;
};

struct CrashEvent {
  std::size_t worker = 0;
  std::int64_t iteration = 0;  // crash takes effect at the end of it

  bool operator==(const CrashEvent&) const = default;
};

struct CrashSchedule {
  std::vector<CrashEvent> events;

  // Worker n crashes at iteration n * iterations / workers.
  static CrashSchedule every(std::size_t workers, std::int64_t iterations);

  // Throws ConfigError on out-of-range workers or repeated crashes.
  void validate(std::size_t workers) const;
  std::vector<std::size_t> crashing_at(std::int64_t iteration) const;
};

struct SimContext {
  Network& network;
  std::int64_t iteration;
};

// A distributed training procedure driven one global iteration at a time.
// Hooks run in the order they are declared; worker_step runs once per alive
// worker in index order.
class Protocol {
 public:
  virtual ~Protocol() = default;

  virtual std::size_t worker_count() const = 0;
  virtual void server_send(SimContext& ctx) = 0;
  virtual void worker_step(SimContext& ctx, std::size_t worker) = 0;
  virtual void server_receive(SimContext& ctx) = 0;
  virtual void peer_exchange(SimContext& ctx) = 0;
  virtual void on_crash(std::size_t /*worker*/) {}

  virtual const Generator& server_generator() const = 0;
};

struct RunResult {
  MetricsSeries metrics;
  TrafficLedger ledger;
  std::int64_t completed_iterations = 0;
  // Every worker crashed before the last iteration.
  bool terminated_early = false;
  std::uint64_t messages_sent = 0;
  std::uint64_t messages_delivered = 0;
  std::uint64_t messages_dropped = 0;
};

// Runs global iterations 1..iterations. Crashes scheduled for iteration t
// take effect after t's exchanges; crashes scheduled for 0 before the first.
// Metrics are taken from the server-side generator at checkpoint iterations.
RunResult run_global_iterations(Protocol& protocol, std::int64_t iterations,
                                const CrashSchedule& crashes,
                                const std::set<std::int64_t>& checkpoints,
                                const Scorer& scorer);

}  // namespace mdgan
