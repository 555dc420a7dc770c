#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/contact.hpp"
#include "wsn/metrics.hpp"
#include "wsn/node.hpp"
#include "wsn/protocols.hpp"
#include "wsn/rng.hpp"
#include "wsn/trace.hpp"

namespace wsn {

struct Packet {
  std::uint64_t pkt_id = 0;
  NodeId src = 0;
  SimTime created;
  std::optional<SimTime> delivered;
  std::uint32_t size_bits = 0;
  std::uint32_t hops = 0;
};

struct ForwardOutcome {
  bool delivered = false;
  std::uint32_t hops = 0;
  std::optional<NodeId> failed_at;
  std::string reason;
};

/// Discrete event kinds, in tie-break rank order for equal timestamps.
enum class EventKind : std::uint8_t {
  MobilityUpdate = 0,
  Meeting = 1,
  ContactTimeout = 2,
  RoundBoundary = 3,
  ProtocolCheck = 4,  // internal, not traced
  PacketSend = 5,
  AggregateForward = 6,
  PacketReceive = 7,
  NodeDeath = 8,
};

struct Event {
  SimTime time;
  EventKind kind = EventKind::MobilityUpdate;
  NodeId a = 0;
  NodeId b = 0;
  std::uint64_t seq = 0;  // insertion order, last-resort tie-break
  std::uint64_t payload = 0;

  /// Total order: time, kind rank, node ids, insertion.
  bool operator>(const Event& o) const;
};

class EventQueue {
 public:
  void push(Event e);
  Event pop();
  const Event& top() const { return heap_.top(); }
  bool empty() const { return heap_.empty(); }
  std::size_t size() const { return heap_.size(); }

 private:
  std::priority_queue<Event, std::vector<Event>, std::greater<Event>> heap_;
  std::uint64_t next_seq_ = 0;
};

struct RunResult {
  RunReport report;
  std::vector<trace::Record> trace;
  std::vector<KnowledgeState> knowledge;
  std::vector<NodeState> final_nodes;
  Clustering final_clustering;
  MetricsAccumulator metrics;
};

/// One deterministic simulation run. Strictly single-threaded.
class Simulator {
 public:
  explicit Simulator(SimConfig config);

  /// Schedule the periodic timeline and process it to the end.
  RunResult run();

  // Lower-level control, used by tests building hand-made scenarios.
  void process_until(SimTime end);
  void schedule_send(NodeId src, SimTime at, bool periodic = false);
  void install_clustering(Clustering clustering);
  ForwardOutcome forward_packet(Packet& pkt, std::span<const NodeId> route, SimTime now);
  std::vector<NodeId> route_to_sink(NodeId from) const;

  const SimConfig& config() const { return config_; }
  const std::vector<NodeState>& nodes() const { return nodes_; }
  std::vector<NodeState>& nodes() { return nodes_; }
  const std::vector<KnowledgeState>& knowledge() const { return knowledge_; }
  const Clustering& clustering() const { return clustering_; }
  const MetricsAccumulator& metrics() const { return metrics_; }
  const std::vector<trace::Record>& trace() const { return trace_; }
  std::uint64_t trace_hash() const;

 private:
  bool is_ofz() const { return config_.protocol == Protocol::OptimizedFarZone; }
  bool uses_far_zone() const { return config_.protocol != Protocol::Leach; }
  bool mobility_prediction_on() const {
    return is_ofz() && config_.protocol_params.departure_threshold > 0;
  }

  void record(SimTime t, trace::Body body);
  void handle(const Event& e);
  void on_tick(SimTime t);
  void on_meeting(SimTime t, NodeId a, NodeId b);
  void on_timeout(SimTime t, NodeId node, NodeId peer);
  void on_round(SimTime t, std::uint32_t round);
  void on_protocol_check(SimTime t);
  void on_send(SimTime t, NodeId src, bool periodic);
  void on_aggregate(SimTime t, NodeId aggregator);
  void on_receive(SimTime t, std::uint64_t pkt_id);
  /// OFZ fallback when the aggregator is unreachable: hand the packet to the
  /// gateway toward the sink named in the source's gateway table. Returns
  /// false (nothing done) when there is no usable entry.
  bool via_gateway(SimTime t, Packet& p);
  std::optional<NodeId> aggregator_of(NodeId n) const;
  void enqueue(SimTime t, const Packet& p, NodeId aggregator);
  void to_sink(SimTime t, Packet& p, std::span<const NodeId> route);

  std::vector<NodeId> elect_heads(std::uint32_t round);
  void serve_hidden_clusters();
  void assign(NodeId n, std::optional<ClusterId> c);
  void dissolve(ClusterId id);
  void record_cluster(SimTime t, const ClusterView& c);
  void sample(SimTime t);

  /// Debit energy; returns false if the node could not pay in full (it then
  /// dies with zero residual).
  bool debit(SimTime t, NodeId n, double joules, const char* cause);
  void drop(SimTime t, const Packet& p, NodeId at, const char* reason);
  bool in_range(NodeId a, NodeId b) const;
  double energy(NodeId n) const { return nodes_[n].residual_energy_j; }
  SimTime slot() const;
  SimTime frame_time(NodeId aggregator) const;

  SimConfig config_;
  Area area_;
  SimTime end_;
  SimTime tick_;
  std::vector<NodeState> nodes_;
  std::vector<KnowledgeState> knowledge_;
  std::vector<Rng> mobility_rng_;
  Rng election_rng_;
  Clustering clustering_;
  RoundState round_state_;
  ClusterId next_cluster_id_ = 1;
  std::map<std::pair<NodeId, NodeId>, SimTime> timers_;
  std::vector<ClusterId> departure_reelected_;
  std::map<NodeId, std::vector<std::uint64_t>> buffers_;
  std::map<std::uint64_t, Packet> packets_;
  std::uint64_t next_pkt_ = 1;
  EventQueue queue_;
  MetricsAccumulator metrics_;
  std::vector<trace::Record> trace_;  // kept only when record_trace is set
  trace::Hasher hasher_;
  double delivered_bytes_ = 0;
  double delay_sum_ = 0;
};

/// Full run with trace and final state.
RunResult simulate(const SimConfig& config);

/// Validates the config and returns the report of one run.
RunReport run_simulation(const SimConfig& config);

}  // namespace wsn
