#include <chrono>
#include <thread>

#include "doctest.h"
#include "dipoa/network.hpp"

using namespace dipoa;

TEST_CASE("connectivity of small hypergraphs") {
  CHECK(CheckConnected(3, {{0, 1}, {1, 2}}));
  CHECK_FALSE(CheckConnected(4, {{0, 1}, {2, 3}}));
  CHECK(CheckConnected(5, {{0, 1, 2, 3, 4}}));
  CHECK_THROWS(Hypergraph::FromEdges(4, {{0, 1}, {2, 3}}));
}

TEST_CASE("block topology overlaps consecutive blocks") {
  const Hypergraph h = Hypergraph::Blocks(4, 2);
  REQUIRE(h.num_edges() == 2);
  CHECK(h.edges[0] == std::vector<int>{0, 1});
  CHECK(h.edges[1] == std::vector<int>{1, 2, 3});
  CHECK(h.membership[1] == std::vector<int>{0, 1});
  CHECK_THROWS(Hypergraph::Blocks(2, 3));
}

TEST_CASE("topology JSON round trip") {
  const Hypergraph h = Hypergraph::FromEdges(5, {{0, 1, 2}, {2, 3}, {3, 4}});
  const Hypergraph back = TopologyFromJson(TopologyToJson(h));
  CHECK(back.num_nodes == 5);
  CHECK(back.edges == h.edges);
}

TEST_CASE("reduce sum") {
  Communicator comm(Hypergraph::Blocks(3, 1));
  const std::vector<double> values{1.0, 2.0, 3.0};
  CHECK(comm.ReduceSum([&](int i) { return std::optional<double>(values[i]); }) == 6.0);
  CHECK(comm.ReduceSum([](int) { return std::optional<double>(0.0); }) == 0.0);
  CHECK_THROWS_AS(comm.ReduceSum([](int i) {
    return i == 1 ? std::nullopt : std::optional<double>(1.0);
  }),
                  MissingContribution);
}

TEST_CASE("broadcast delivers identical copies") {
  Communicator comm(Hypergraph::Blocks(4, 2));
  const Payload z{1, 0, 1};
  const auto copies = comm.Broadcast(z);
  REQUIRE(copies.size() == 4);
  for (const auto& c : copies) CHECK(c == z);
}

TEST_CASE("gather orders payloads by sender regardless of posting order") {
  Channel channel;
  for (int sender : {3, 1, 2}) channel.Post(sender, 0, 7, Payload{double(sender)});
  const auto msgs = channel.Collect(0, 7);
  REQUIRE(msgs.size() == 3);
  CHECK(msgs[0].sender == 1);
  CHECK(msgs[1].sender == 2);
  CHECK(msgs[2].sender == 3);

  Communicator comm(Hypergraph::Blocks(3, 1), {Schedule::kThreaded});
  const auto gathered = comm.Gather([](int i) { return std::optional<Payload>(Payload{double(i)}); });
  REQUIRE(gathered.size() == 3);
  for (int i = 0; i < 3; ++i) CHECK(gathered[i] == Payload{double(i)});
}

TEST_CASE("a stalled worker makes the phase time out") {
  WorkerGroup group(3, Schedule::kThreaded, 0.1);
  CHECK_THROWS_AS(group.Run([](int w) {
    if (w == 2) std::this_thread::sleep_for(std::chrono::milliseconds(400));
  }),
                  Timeout);
}

TEST_CASE("barrier with a missing party times out") {
  Barrier barrier(2, 0.1);
  CHECK_THROWS_AS(barrier.Arrive(), Timeout);
}

TEST_CASE("messages from round r are visible only from round r + 1") {
  Communicator comm(Hypergraph::Blocks(2, 1));
  std::vector<size_t> seen(3, 99);
  comm.Step([&](int w) {
    if (w == 0) comm.Post(0, 1, Payload{5});
    if (w == 1) seen[0] = comm.Inbox(1).size();
  });
  comm.Step([&](int w) {
    if (w == 1) seen[1] = comm.Inbox(1).size();
  });
  CHECK(seen[0] == 0);
  CHECK(seen[1] == 1);
}

TEST_CASE("sequential and threaded schedules leave the same trace") {
  auto run = [](Schedule s) {
    Communicator comm(Hypergraph::Blocks(4, 2), {s, 0.0, true});
    for (int round = 0; round < 5; ++round) {
      comm.Step([&](int w) {
        if (w < comm.num_nodes()) comm.Post(w, comm.root(), Payload{double(w * round)});
      });
      comm.Broadcast(Payload{double(round)});
    }
    return comm.trace_digest();
  };
  CHECK(run(Schedule::kSequential) == run(Schedule::kThreaded));
}

TEST_CASE("schedule names") {
  CHECK(ParseSchedule("sequential") == Schedule::kSequential);
  CHECK(ParseSchedule("threaded") == Schedule::kThreaded);
  CHECK_THROWS(ParseSchedule("bogus"));
}
