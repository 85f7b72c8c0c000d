#include "dipoa/network.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <numeric>

#include "json.hpp"

namespace dipoa {

bool CheckConnected(int num_nodes, const std::vector<std::vector<int>>& edges) {
  if (num_nodes <= 0 || edges.empty()) return false;
  // Union-find over nodes; each edge merges its members.
  std::vector<int> parent(num_nodes);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  };
  std::vector<char> covered(num_nodes, 0);
  for (const auto& e : edges) {
    if (e.empty()) return false;
    for (int v : e) {
      if (v < 0 || v >= num_nodes) return false;
      covered[v] = 1;
      parent[find(v)] = find(e.front());
    }
  }
  const int root = find(0);
  for (int v = 0; v < num_nodes; ++v) {
    if (!covered[v] || find(v) != root) return false;
  }
  return true;
}

Hypergraph Hypergraph::FromEdges(int num_nodes, std::vector<std::vector<int>> edges) {
  for (auto& e : edges) {
    std::sort(e.begin(), e.end());
    e.erase(std::unique(e.begin(), e.end()), e.end());
  }
  if (!CheckConnected(num_nodes, edges)) {
    throw std::invalid_argument("hypergraph must cover every node and be connected");
  }
  Hypergraph h;
  h.num_nodes = num_nodes;
  h.edges = std::move(edges);
  h.membership.assign(num_nodes, {});
  for (int j = 0; j < h.num_edges(); ++j) {
    for (int v : h.edges[j]) h.membership[v].push_back(j);
  }
  return h;
}

Hypergraph Hypergraph::Blocks(int num_nodes, int num_edges) {
  if (num_nodes < 1 || num_edges < 1 || num_edges > num_nodes) {
    throw std::invalid_argument("block topology needs 1 <= K <= N");
  }
  std::vector<std::vector<int>> edges(num_edges);
  for (int j = 0; j < num_edges; ++j) {
    const int lo = static_cast<int>(static_cast<long long>(j) * num_nodes / num_edges);
    const int hi = static_cast<int>(static_cast<long long>(j + 1) * num_nodes / num_edges);
    for (int v = (j > 0 ? lo - 1 : lo); v < hi; ++v) edges[j].push_back(v);
  }
  return FromEdges(num_nodes, std::move(edges));
}

void Channel::Post(int sender, int receiver, std::uint64_t round, Payload payload) {
  std::lock_guard<std::mutex> lock(mu_);
  auto [it, inserted] = boxes_.emplace(Key{round, receiver, sender}, std::move(payload));
  if (!inserted) throw std::logic_error("duplicate message for (sender, receiver, round)");
}

std::vector<Message> Channel::Collect(int receiver, std::uint64_t round) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<Message> out;
  auto it = boxes_.lower_bound(Key{round, receiver, std::numeric_limits<int>::min()});
  for (; it != boxes_.end(); ++it) {
    const auto& [r, recv, send] = it->first;
    if (r != round || recv != receiver) break;
    out.push_back(Message{send, recv, r, it->second});
  }
  return out;
}

namespace {

void Fnv(std::uint64_t* h, const void* data, std::size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t k = 0; k < len; ++k) {
    *h ^= p[k];
    *h *= 0x100000001b3ULL;
  }
}

}  // namespace

void Channel::Seal(std::uint64_t round) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = boxes_.lower_bound(Key{round, std::numeric_limits<int>::min(), 0});
  for (; it != boxes_.end() && std::get<0>(it->first) == round; ++it) {
    const auto& [r, recv, send] = it->first;
    const std::uint64_t size = it->second.size();
    Fnv(&digest_, &r, sizeof(r));
    Fnv(&digest_, &recv, sizeof(recv));
    Fnv(&digest_, &send, sizeof(send));
    Fnv(&digest_, &size, sizeof(size));
    Fnv(&digest_, it->second.data(), it->second.size() * sizeof(double));
    if (keep_trace_) trace_.push_back(Message{send, recv, r, it->second});
  }
}

void Channel::Discard(std::uint64_t round) {
  std::lock_guard<std::mutex> lock(mu_);
  auto end = boxes_.lower_bound(Key{round + 1, std::numeric_limits<int>::min(), 0});
  boxes_.erase(boxes_.begin(), end);
}

Barrier::Barrier(int count, double timeout_s) : count_(count), timeout_s_(timeout_s) {}

void Barrier::Arrive() {
  std::unique_lock<std::mutex> lock(mu_);
  if (broken_) throw Timeout("barrier broken by an earlier timeout");
  const std::uint64_t gen = generation_;
  if (++waiting_ == count_) {
    waiting_ = 0;
    ++generation_;
    cv_.notify_all();
    return;
  }
  auto released = [&] { return generation_ != gen || broken_; };
  if (timeout_s_ > 0) {
    if (!cv_.wait_for(lock, std::chrono::duration<double>(timeout_s_), released)) {
      broken_ = true;
      cv_.notify_all();
      throw Timeout("barrier timed out waiting for a worker");
    }
  } else {
    cv_.wait(lock, released);
  }
  if (broken_) throw Timeout("barrier broken by an earlier timeout");
}

Schedule ParseSchedule(const std::string& name) {
  if (name == "sequential") return Schedule::kSequential;
  if (name == "threaded") return Schedule::kThreaded;
  if (name == "auto") {
    return std::thread::hardware_concurrency() > 1 ? Schedule::kThreaded : Schedule::kSequential;
  }
  throw std::invalid_argument("unknown schedule: " + name);
}

WorkerGroup::WorkerGroup(int num_workers, Schedule schedule, double timeout_s)
    : num_workers_(num_workers), schedule_(schedule), timeout_s_(timeout_s) {
  if (schedule_ == Schedule::kThreaded) {
    threads_.reserve(num_workers_);
    for (int w = 0; w < num_workers_; ++w) threads_.emplace_back(&WorkerGroup::ThreadMain, this, w);
  }
}

WorkerGroup::~WorkerGroup() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stopping_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

void WorkerGroup::ThreadMain(int w) {
  std::uint64_t seen = 0;
  for (;;) {
    std::shared_ptr<const std::function<void(int)>> job;
    {
      std::unique_lock<std::mutex> lock(mu_);
      start_cv_.wait(lock, [&] { return stopping_ || job_generation_ != seen; });
      if (stopping_) return;
      seen = job_generation_;
      job = shared_job_;
    }
    std::exception_ptr err;
    try {
      (*job)(w);
    } catch (...) {
      err = std::current_exception();
    }
    std::lock_guard<std::mutex> lock(mu_);
    if (err && seen == job_generation_) errors_[w] = err;
    if (--remaining_ == 0) done_cv_.notify_all();
  }
}

void WorkerGroup::Run(const std::function<void(int)>& fn) {
  if (schedule_ == Schedule::kSequential) {
    const auto start = std::chrono::steady_clock::now();
    for (int w = 0; w < num_workers_; ++w) fn(w);
    if (timeout_s_ > 0) {
      const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
      if (took.count() > timeout_s_) throw Timeout("worker phase exceeded its time limit");
    }
    return;
  }
  std::unique_lock<std::mutex> lock(mu_);
  // Stragglers from a timed-out phase must finish before the next one starts.
  done_cv_.wait(lock, [&] { return remaining_ == 0; });
  shared_job_ = std::make_shared<const std::function<void(int)>>(fn);
  errors_.assign(num_workers_, nullptr);
  remaining_ = num_workers_;
  ++job_generation_;
  start_cv_.notify_all();
  auto done = [&] { return remaining_ == 0; };
  if (timeout_s_ > 0) {
    if (!done_cv_.wait_for(lock, std::chrono::duration<double>(timeout_s_), done)) {
      throw Timeout("worker phase exceeded its time limit");
    }
  } else {
    done_cv_.wait(lock, done);
  }
  for (auto& e : errors_) {
    if (e) std::rethrow_exception(e);
  }
}

Communicator::Communicator(Hypergraph graph, NetworkOptions options)
    : graph_(std::move(graph)),
      channel_(options.keep_trace),
      workers_(graph_.num_nodes + graph_.num_edges() + 1, options.schedule, options.timeout_s) {}

void Communicator::Post(int sender, int receiver, Payload payload) {
  channel_.Post(sender, receiver, round_, std::move(payload));
}

std::vector<Message> Communicator::Collect(int receiver, std::uint64_t round) const {
  return channel_.Collect(receiver, round);
}

std::vector<Message> Communicator::Inbox(int receiver) const {
  return channel_.Collect(receiver, round_ - 1);
}

void Communicator::Step(const std::function<void(int worker)>& fn) {
  workers_.Run(fn);
  channel_.Seal(round_);
  channel_.Discard(round_ - 1);
  ++round_;
}

namespace {

std::vector<Payload> OrderedFromNodes(const std::vector<Message>& msgs, int num_nodes) {
  std::vector<Payload> out(num_nodes);
  std::vector<char> seen(num_nodes, 0);
  for (const auto& m : msgs) {
    if (m.sender >= 0 && m.sender < num_nodes) {
      out[m.sender] = m.payload;
      seen[m.sender] = 1;
    }
  }
  for (int i = 0; i < num_nodes; ++i) {
    if (!seen[i]) throw MissingContribution("node " + std::to_string(i) + " did not contribute");
  }
  return out;
}

}  // namespace

double Communicator::ReduceSum(const std::function<std::optional<double>(int node)>& contribution) {
  const int root_id = root();
  Step([&](int w) {
    if (w >= num_nodes()) return;
    if (auto v = contribution(w)) Post(w, root_id, Payload{*v});
  });
  double sum = 0.0;
  for (const auto& p : OrderedFromNodes(Collect(root_id, round_ - 1), num_nodes())) sum += p.at(0);
  return sum;
}

std::vector<Payload> Communicator::Gather(
    const std::function<std::optional<Payload>(int node)>& payload) {
  const int root_id = root();
  Step([&](int w) {
    if (w >= num_nodes()) return;
    if (auto p = payload(w)) Post(w, root_id, std::move(*p));
  });
  return OrderedFromNodes(Collect(root_id, round_ - 1), num_nodes());
}

std::vector<Payload> Communicator::Broadcast(const Payload& payload) {
  const int root_id = root();
  Step([&](int w) {
    if (w != root_id) return;
    for (int i = 0; i < num_nodes(); ++i) Post(root_id, i, payload);
  });
  std::vector<Payload> received(num_nodes());
  Step([&](int w) {
    if (w >= num_nodes()) return;
    auto msgs = Inbox(w);
    if (msgs.size() != 1) throw MissingContribution("broadcast not delivered");
    received[w] = msgs.front().payload;
  });
  return received;
}

void Communicator::Barrier() {
  Step([](int) {});
}

std::string TopologyToJson(const Hypergraph& h) {
  nlohmann::json j;
  j["N"] = h.num_nodes;
  j["K"] = h.num_edges();
  j["edges"] = h.edges;
  return j.dump();
}

Hypergraph TopologyFromJson(const std::string& text) {
  nlohmann::json j;
  std::vector<std::vector<int>> edges;
  int n = 0;
  try {
    j = nlohmann::json::parse(text);
    n = j.at("N").get<int>();
    edges = j.at("edges").get<std::vector<std::vector<int>>>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("topology JSON: ") + e.what());
  }
  if (j.contains("K") && j.at("K").get<int>() != static_cast<int>(edges.size())) {
    throw std::invalid_argument("topology: K does not match the number of edges");
  }
  return Hypergraph::FromEdges(n, std::move(edges));
}

}  // namespace dipoa
