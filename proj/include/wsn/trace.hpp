#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "wsn/types.hpp"

namespace wsn::trace {

// One record per processed event or protocol action. Serialized one JSON
// object per line: {"t":<us>,"k":"<kind>",...}. Field order is fixed so the
// text form is byte-stable.

struct MobilityUpdate {};
struct Meeting {
  NodeId a = 0, b = 0;
  std::optional<ClusterId> cluster_a, cluster_b;
};
struct ContactTimeout {
  NodeId node = 0, peer = 0;
};
struct RoundBoundary {
  std::uint32_t round = 0;
};
struct ClusterFormed {
  ClusterId cluster = 0;
  NodeId head = 0;
  std::vector<NodeId> members;
  std::vector<NodeId> far_zone;
  std::optional<NodeId> zone_head;
  bool hidden = false;
};
struct Sync {
  NodeId a = 0, b = 0;
};
struct Leave {
  NodeId node = 0;
  ClusterId cluster = 0;
  std::size_t gateway_entries_after = 0;
};
struct Join {
  NodeId node = 0, peer = 0;
  std::optional<ClusterId> from;
  ClusterId to = 0;
  double stability_before = 0, stability_after = 0;
};
struct Reelect {
  ClusterId cluster = 0;
  NodeId old_head = 0;
  std::optional<NodeId> new_head;
  std::string trigger;  // "departure" | "critical_energy"
  double observed = 0, limit = 0;
};
struct PacketSend {
  NodeId src = 0;
  std::uint64_t pkt = 0;
};
struct Debit {
  NodeId node = 0;
  std::string cause;  // "tx" | "rx" | "idle"
  double joules = 0, residual = 0;
};
struct AggregateForward {
  NodeId node = 0;
  std::uint32_t packets = 0;
  std::uint32_t hops = 0;
  bool delivered = false;
};
struct PacketDrop {
  std::uint64_t pkt = 0;
  NodeId at = 0;
  std::string reason;
};
struct PacketReceive {
  NodeId dst = 0;
  std::uint64_t pkt = 0;
  std::int64_t created_us = 0;
  std::uint32_t hops = 0;
};
struct NodeDeath {
  NodeId node = 0;
};

using Body = std::variant<MobilityUpdate, Meeting, ContactTimeout, RoundBoundary, ClusterFormed,
                          Sync, Leave, Join, Reelect, PacketSend, Debit, AggregateForward,
                          PacketDrop, PacketReceive, NodeDeath>;

struct Record {
  SimTime t;
  Body body;
};

std::string_view kind(const Body& b);

/// One line, no trailing newline.
std::string to_line(const Record& r);
Record from_json(const nlohmann::json& j);
Record parse_line(std::string_view line);

/// Trace file: first line {"k":"header","config":{...}}, then records.
struct TraceFile {
  nlohmann::json config;
  std::vector<Record> records;
};

void write(std::ostream& os, const nlohmann::json& config, const std::vector<Record>& records);
TraceFile read(std::istream& is);

/// Incremental 64-bit FNV-1a over serialized records (newline separated).
class Hasher {
 public:
  void add(const Record& r);
  std::uint64_t value() const { return h_; }

 private:
  void feed(std::string_view s);
  std::uint64_t h_ = 0xcbf29ce484222325ULL;
};

std::uint64_t hash(const std::vector<Record>& records);

}  // namespace wsn::trace
