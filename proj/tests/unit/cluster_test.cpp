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

#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "mdgan/cluster.hpp"
#include "mdgan/errors.hpp"

namespace mdgan {
namespace {

Message params_message(NodeId src, NodeId dst, std::size_t count,
                       double tag = 0.0) {
  return make_message(src, dst, DiscParams{std::vector<double>(count, tag)});
}

// Each worker sends one 2-scalar feedback per iteration and the server
// answers with a 3-scalar broadcast; records hook order.
class EchoProtocol : public Protocol {
 public:
  explicit EchoProtocol(std::size_t workers) : workers_(workers) {
    Rng rng(0);
    const std::vector<std::size_t> dims{1, 1};
    gen_.net = Mlp::zeros(dims, Activation::kRelu, Activation::kIdentity);
    gen_.noise_dim = 1;
  }
  std::size_t worker_count() const override { return workers_; }
  void server_send(SimContext& ctx) override {
    trace.push_back("send@" + std::to_string(ctx.iteration));
    for (std::size_t n : ctx.network.alive_workers()) {
      ctx.network.send(params_message(NodeId::server(), NodeId::worker(n), 3));
    }
  }
  void worker_step(SimContext& ctx, std::size_t n) override {
    trace.push_back("W" + std::to_string(n));
    EXPECT_EQ(ctx.network.receive_all(NodeId::worker(n)).size(), 1u);
    ctx.network.send(make_message(
        NodeId::worker(n), NodeId::server(),
        Feedback{FeedbackBundle{Tensor::Zero(1, 2)}}));
  }
  void server_receive(SimContext& ctx) override {
    received.push_back(ctx.network.receive_all(NodeId::server()).size());
  }
  void peer_exchange(SimContext&) override { trace.push_back("peer"); }
  void on_crash(std::size_t n) override {
    trace.push_back("crash" + std::to_string(n));
  }
  const Generator& server_generator() const override { return gen_; }

  std::vector<std::string> trace;
  std::vector<std::size_t> received;

 private:
  std::size_t workers_;
  Generator gen_;
};

TEST(Payload, ByteSizeIsFourPerScalar) {
  const Message m = params_message(NodeId::worker(1), NodeId::worker(2), 100);
  EXPECT_EQ(m.byte_size, 400u);
  const Message pair = make_message(
      NodeId::server(), NodeId::worker(1),
      GeneratedBatchPair{Tensor::Zero(4, 2), Tensor::Zero(4, 2)});
  EXPECT_EQ(pair.byte_size, 2u * 4 * 2 * 4);
  const Message fb =
      make_message(NodeId::worker(1), NodeId::server(),
                   Feedback{FeedbackBundle{Tensor::Zero(10, 3)}});
  EXPECT_EQ(fb.byte_size, 10u * 3 * 4);
  EXPECT_EQ(scalar_count(GanParams{std::vector<double>(5),
                                   std::vector<double>(7)}),
            12u);
}

TEST(LinkClass, ClassifyAndNames) {
  EXPECT_EQ(classify(NodeId::server(), NodeId::worker(2)),
            LinkClass::kServerToWorker);
  EXPECT_EQ(classify(NodeId::worker(2), NodeId::server()),
            LinkClass::kWorkerToServer);
  EXPECT_EQ(classify(NodeId::worker(1), NodeId::worker(2)),
            LinkClass::kWorkerToWorker);
  EXPECT_THROW(classify(NodeId::server(), NodeId::server()), ConfigError);
  for (LinkClass l : kLinkClasses) EXPECT_EQ(parse_link_class(to_string(l)), l);
  EXPECT_EQ(to_string(NodeId::worker(3)), "W3");
  EXPECT_EQ(to_string(NodeId::server()), "C");
}

TEST(Network, FifoPerLinkAndSourceOrder) {
  Network net(3);
  net.send(params_message(NodeId::worker(3), NodeId::worker(1), 1, 30));
  net.send(params_message(NodeId::worker(2), NodeId::worker(1), 1, 20));
  net.send(params_message(NodeId::worker(2), NodeId::worker(1), 1, 21));
  const auto inbox = net.receive_all(NodeId::worker(1));
  ASSERT_EQ(inbox.size(), 3u);
  std::vector<double> tags;
  for (const Message& m : inbox) {
    tags.push_back(std::get<DiscParams>(m.payload).theta[0]);
  }
  EXPECT_EQ(tags, (std::vector<double>{20, 21, 30}));
  EXPECT_TRUE(net.receive_all(NodeId::worker(1)).empty());
}

TEST(Network, CrashedSenderIsRejectedWithoutCharge) {
  Network net(2);
  net.crash(1);
  EXPECT_FALSE(net.alive(NodeId::worker(1)));
  EXPECT_FALSE(
      net.send(params_message(NodeId::worker(1), NodeId::server(), 10)));
  EXPECT_EQ(net.ledger().totals(LinkClass::kWorkerToServer).bytes, 0u);
  EXPECT_EQ(net.sent_count(), 0u);
}

TEST(Network, CrashedReceiverIsChargedThenDropped) {
  Network net(2);
  net.crash(2);
  EXPECT_TRUE(net.send(params_message(NodeId::server(), NodeId::worker(2), 5)));
  EXPECT_EQ(net.ledger().totals(LinkClass::kServerToWorker).bytes, 20u);
  EXPECT_EQ(net.dropped_count(), 1u);
  EXPECT_TRUE(net.receive_all(NodeId::worker(2)).empty());
}

TEST(Network, CrashDropsQueuedMessages) {
  Network net(2);
  net.send(params_message(NodeId::worker(1), NodeId::worker(2), 1));
  net.send(params_message(NodeId::server(), NodeId::worker(2), 1));
  net.crash(2);
  EXPECT_EQ(net.dropped_count(), 2u);
  EXPECT_EQ(net.alive_workers(), std::vector<std::size_t>{1});
}

TEST(Network, ConservationOfMessages) {
  Network net(4);
  for (int i = 0; i < 10; ++i) {
    net.send(params_message(NodeId::server(),
                            NodeId::worker(1 + i % 4), 1));
  }
  net.receive_all(NodeId::worker(1));
  net.receive_all(NodeId::worker(2));
  net.crash(3);
  EXPECT_EQ(net.sent_count(), 10u);
  // 3 + 3 delivered, 2 dropped with worker 3, 2 still queued for worker 4.
  EXPECT_EQ(net.delivered_count(), 6u);
  EXPECT_EQ(net.dropped_count(), 2u);
  EXPECT_EQ(net.receive_all(NodeId::worker(4)).size(), 2u);
}

TEST(Network, UnknownNodesThrow) {
  Network net(2);
  EXPECT_THROW(net.send(params_message(NodeId::server(), NodeId::worker(3), 1)),
               ConfigError);
  EXPECT_THROW(net.crash(0), ConfigError);
  EXPECT_THROW(Network(0), ConfigError);
}

TEST(Ledger, RowsAggregateByIterationAndClass) {
  TrafficLedger ledger;
  ledger.record(1, NodeId::server(), NodeId::worker(1), 8);
  ledger.record(1, NodeId::server(), NodeId::worker(2), 8);
  ledger.record(1, NodeId::worker(1), NodeId::server(), 4);
  ledger.record(1, NodeId::worker(2), NodeId::server(), 4);
  ledger.record(2, NodeId::worker(1), NodeId::worker(2), 12);
  const auto rows = ledger.rows();
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (LedgerRow{1, LinkClass::kServerToWorker, 16, 2, 0, 8}));
  EXPECT_EQ(rows[1], (LedgerRow{1, LinkClass::kWorkerToServer, 8, 2, 8, 0}));
  EXPECT_EQ(rows[2], (LedgerRow{2, LinkClass::kWorkerToWorker, 12, 1, 0, 12}));
  EXPECT_EQ(ledger.last_activity(NodeId::worker(2)), 2);
  EXPECT_FALSE(ledger.last_activity(NodeId::worker(5)).has_value());
}

TEST(Ledger, CsvRoundTripsTotals) {
  TrafficLedger ledger;
  ledger.record(1, NodeId::server(), NodeId::worker(1), 8);
  ledger.record(3, NodeId::worker(1), NodeId::server(), 4);
  ledger.record(3, NodeId::worker(1), NodeId::worker(2), 400);
  std::stringstream csv;
  ledger.write_csv(csv);
  EXPECT_EQ(csv.str(),
            "iteration,link_class,bytes,messages,max_ingress_server,"
            "max_ingress_worker\n"
            "1,C->W,8,1,0,8\n"
            "3,W->C,4,1,4,0\n"
            "3,W->W,400,1,0,400\n");
  EXPECT_EQ(read_ledger_totals(csv), ledger.totals());
  std::istringstream bad("nonsense\n");
  EXPECT_THROW(read_ledger_totals(bad), FormatError);
}

TEST(CrashSchedule, EveryAndValidation) {
  const CrashSchedule every = CrashSchedule::every(5, 100);
  ASSERT_EQ(every.events.size(), 5u);
  EXPECT_EQ(every.events[0], (CrashEvent{1, 20}));
  EXPECT_EQ(every.events[4], (CrashEvent{5, 100}));
  EXPECT_EQ(every.crashing_at(40), std::vector<std::size_t>{2});
  EXPECT_THROW((CrashSchedule{{{6, 1}}}.validate(5)), ConfigError);
  EXPECT_THROW((CrashSchedule{{{1, 1}, {1, 2}}}.validate(5)), ConfigError);
}

TEST(Runner, HookOrderAndCheckpoints) {
  EchoProtocol p(2);
  int scored = 0;
  const RunResult r = run_global_iterations(
      p, 2, {}, {2}, [&](const Generator&, std::int64_t i) {
        ++scored;
        return MetricsRow{i};
      });
  EXPECT_EQ(p.trace, (std::vector<std::string>{"send@1", "W1", "W2", "peer",
                                               "send@2", "W1", "W2", "peer"}));
  EXPECT_EQ(scored, 1);
  ASSERT_EQ(r.metrics.size(), 1u);
  EXPECT_EQ(r.metrics[0].iteration, 2);
  EXPECT_EQ(r.completed_iterations, 2);
  EXPECT_FALSE(r.terminated_early);
  EXPECT_EQ(r.ledger.totals(LinkClass::kServerToWorker).bytes, 2u * 2 * 12);
  EXPECT_EQ(r.ledger.totals(LinkClass::kWorkerToServer).bytes, 2u * 2 * 8);
  EXPECT_EQ(r.messages_sent, r.messages_delivered + r.messages_dropped);
}

TEST(Runner, CrashesTakeEffectAfterTheirIteration) {
  EchoProtocol p(3);
  const RunResult r = run_global_iterations(
      p, 4, CrashSchedule{{{2, 2}, {3, 0}}}, {}, nullptr);
  EXPECT_EQ(p.received, (std::vector<std::size_t>{2, 2, 1, 1}));
  EXPECT_EQ(r.ledger.last_activity(NodeId::worker(2)), 2);
  EXPECT_FALSE(r.ledger.last_activity(NodeId::worker(3)).has_value());
  EXPECT_FALSE(r.terminated_early);
}

TEST(Runner, StopsWhenEveryWorkerHasCrashed) {
  EchoProtocol p(2);
  const RunResult r = run_global_iterations(
      p, 10, CrashSchedule{{{1, 3}, {2, 5}}}, {}, nullptr);
  EXPECT_EQ(r.completed_iterations, 5);
  EXPECT_TRUE(r.terminated_early);
}

TEST(Runner, IsDeterministic) {
  EchoProtocol a(3), b(3);
  const CrashSchedule crashes{{{1, 2}}};
  EXPECT_EQ(run_global_iterations(a, 5, crashes, {}, nullptr).ledger,
            run_global_iterations(b, 5, crashes, {}, nullptr).ledger);
}

}  // namespace
}  // namespace mdgan
