#ifndef DIPOA_NETWORK_HPP_
#define DIPOA_NETWORK_HPP_

#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "dipoa/types.hpp"

namespace dipoa {

// Nodes 0..N-1 and K hyperedges (local fusion centers). Construct through
// FromEdges or Blocks, both of which reject disconnected topologies.
struct Hypergraph {
  int num_nodes = 0;
  std::vector<std::vector<int>> edges;       // sorted member lists
  std::vector<std::vector<int>> membership;  // node -> sorted LFC list

  int num_edges() const { return static_cast<int>(edges.size()); }

  static Hypergraph FromEdges(int num_nodes, std::vector<std::vector<int>> edges);
  // K contiguous blocks; consecutive blocks share one node. Needs 1 <= K <= N.
  static Hypergraph Blocks(int num_nodes, int num_edges);
};

// True iff every node lies on some edge and the bipartite node/edge graph is
// connected.
bool CheckConnected(int num_nodes, const std::vector<std::vector<int>>& edges);

using Payload = std::vector<double>;

struct Message {
  int sender = 0;
  int receiver = 0;
  std::uint64_t round = 0;
  Payload payload;
};

// Round-based mailboxes keyed by (round, receiver, sender). Posting is
// thread-safe; delivery is always in ascending sender order.
class Channel {
 public:
  explicit Channel(bool keep_trace = false) : keep_trace_(keep_trace) {}

  void Post(int sender, int receiver, std::uint64_t round, Payload payload);
  std::vector<Message> Collect(int receiver, std::uint64_t round) const;

  // Folds every message of `round` into the trace digest in key order.
  void Seal(std::uint64_t round);
  // Drops stored messages of rounds <= round.
  void Discard(std::uint64_t round);

  std::uint64_t digest() const { return digest_; }
  const std::vector<Message>& trace() const { return trace_; }

 private:
  using Key = std::tuple<std::uint64_t, int, int>;
  mutable std::mutex mu_;
  std::map<Key, Payload> boxes_;
  bool keep_trace_;
  std::uint64_t digest_ = 0xcbf29ce484222325ULL;
  std::vector<Message> trace_;
};

// Reusable barrier; a waiter that is not joined by everyone within the
// timeout throws Timeout (and so does everyone after it).
class Barrier {
 public:
  Barrier(int count, double timeout_s);
  void Arrive();

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int count_;
  double timeout_s_;
  int waiting_ = 0;
  std::uint64_t generation_ = 0;
  bool broken_ = false;
};

enum class Schedule { kSequential, kThreaded };

// "sequential", "threaded" or "auto" (threads only with more than one core).
Schedule ParseSchedule(const std::string& name);

// Executes one task per worker per phase, either on persistent threads or
// inline in worker order. Both schedules give identical results because all
// cross-worker data moves through a Channel.
class WorkerGroup {
 public:
  WorkerGroup(int num_workers, Schedule schedule, double timeout_s = 0.0);
  ~WorkerGroup();
  WorkerGroup(const WorkerGroup&) = delete;
  WorkerGroup& operator=(const WorkerGroup&) = delete;

  int size() const { return num_workers_; }
  Schedule schedule() const { return schedule_; }

  // Runs fn(w) for all workers and returns once every one finished. The first
  // exception (lowest worker id) is rethrown; Timeout if a worker overruns.
  void Run(const std::function<void(int)>& fn);

 private:
  void ThreadMain(int w);

  int num_workers_;
  Schedule schedule_;
  double timeout_s_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  std::shared_ptr<const std::function<void(int)>> shared_job_;
  std::uint64_t job_generation_ = 0;
  int remaining_ = 0;
  bool stopping_ = false;
  std::vector<std::exception_ptr> errors_;
};

struct NetworkOptions {
  Schedule schedule = Schedule::kSequential;
  double timeout_s = 0.0;  // 0 disables the phase timeout
  bool keep_trace = false;
};

// In-process stand-in for the message-passing layer: one worker per node, one
// per LFC and a root. Work proceeds in rounds; messages posted in round r are
// readable from round r + 1 on, and every Step ends with a barrier.
class Communicator {
 public:
  explicit Communicator(Hypergraph graph, NetworkOptions options = {});

  const Hypergraph& graph() const { return graph_; }
  int num_nodes() const { return graph_.num_nodes; }
  int num_lfcs() const { return graph_.num_edges(); }
  int num_workers() const { return num_nodes() + num_lfcs() + 1; }
  int NodeWorker(int i) const { return i; }
  int LfcWorker(int j) const { return num_nodes() + j; }
  int root() const { return num_nodes() + num_lfcs(); }

  std::uint64_t round() const { return round_; }

  void Post(int sender, int receiver, Payload payload);
  std::vector<Message> Collect(int receiver, std::uint64_t round) const;
  // Messages addressed to `receiver` in the previous round.
  std::vector<Message> Inbox(int receiver) const;

  void Step(const std::function<void(int worker)>& fn);

  // Collectives. Node contributions come from the callback running on each
  // node worker; results land at the root (returned to the caller).
  double ReduceSum(const std::function<std::optional<double>(int node)>& contribution);
  std::vector<Payload> Gather(const std::function<std::optional<Payload>(int node)>& payload);
  std::vector<Payload> Broadcast(const Payload& payload);
  void Barrier();

  std::uint64_t trace_digest() const { return channel_.digest(); }
  const std::vector<Message>& trace() const { return channel_.trace(); }

 private:
  Hypergraph graph_;
  Channel channel_;
  WorkerGroup workers_;
  std::uint64_t round_ = 1;
};

// Topology JSON {"N":..,"K":..,"edges":[[..],..]}.
std::string TopologyToJson(const Hypergraph& h);
Hypergraph TopologyFromJson(const std::string& text);

}  // namespace dipoa

#endif  // DIPOA_NETWORK_HPP_
