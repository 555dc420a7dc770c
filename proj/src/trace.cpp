#include "wsn/trace.hpp"

#include <istream>
#include <ostream>
#include <stdexcept>

#include <fmt/format.h>

namespace wsn::trace {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using Buf = fmt::memory_buffer;

template <typename T>
void opt(Buf& b, const std::optional<T>& v) {
  if (v)
    fmt::format_to(std::back_inserter(b), "{}", *v);
  else
    fmt::format_to(std::back_inserter(b), "null");
}

void ids(Buf& b, const std::vector<NodeId>& v) {
  fmt::format_to(std::back_inserter(b), "[{}]", fmt::join(v, ","));
}

template <typename T>
std::optional<T> opt_get(const nlohmann::json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<T>();
}

}  // namespace

std::string_view kind(const Body& b) {
  return std::visit(
      overloaded{
          [](const MobilityUpdate&) { return std::string_view("mobility"); },
          [](const Meeting&) { return std::string_view("meeting"); },
          [](const ContactTimeout&) { return std::string_view("timeout"); },
          [](const RoundBoundary&) { return std::string_view("round"); },
          [](const ClusterFormed&) { return std::string_view("cluster"); },
          [](const Sync&) { return std::string_view("sync"); },
          [](const Leave&) { return std::string_view("leave"); },
          [](const Join&) { return std::string_view("join"); },
          [](const Reelect&) { return std::string_view("reelect"); },
          [](const PacketSend&) { return std::string_view("send"); },
          [](const Debit&) { return std::string_view("debit"); },
          [](const AggregateForward&) { return std::string_view("forward"); },
          [](const PacketDrop&) { return std::string_view("drop"); },
          [](const PacketReceive&) { return std::string_view("receive"); },
          [](const NodeDeath&) { return std::string_view("death"); },
      },
      b);
}

std::string to_line(const Record& r) {
  Buf b;
  auto out = std::back_inserter(b);
  fmt::format_to(out, R"({{"t":{},"k":"{}")", r.t.us(), kind(r.body));
  std::visit(
      overloaded{
          [](const MobilityUpdate&) {},
          [&](const Meeting& m) {
            fmt::format_to(out, R"(,"a":{},"b":{},"ca":)", m.a, m.b);
            opt(b, m.cluster_a);
            fmt::format_to(out, R"(,"cb":)");
            opt(b, m.cluster_b);
          },
          [&](const ContactTimeout& m) {
            fmt::format_to(out, R"(,"node":{},"peer":{})", m.node, m.peer);
          },
          [&](const RoundBoundary& m) { fmt::format_to(out, R"(,"round":{})", m.round); },
          [&](const ClusterFormed& m) {
            fmt::format_to(out, R"(,"cluster":{},"head":{},"members":)", m.cluster, m.head);
            ids(b, m.members);
            fmt::format_to(out, R"(,"far_zone":)");
            ids(b, m.far_zone);
            fmt::format_to(out, R"(,"zone_head":)");
            opt(b, m.zone_head);
            fmt::format_to(out, R"(,"hidden":{})", m.hidden);
          },
          [&](const Sync& m) { fmt::format_to(out, R"(,"a":{},"b":{})", m.a, m.b); },
          [&](const Leave& m) {
            fmt::format_to(out, R"(,"node":{},"cluster":{},"gateway_entries_after":{})", m.node,
                           m.cluster, m.gateway_entries_after);
          },
          [&](const Join& m) {
            fmt::format_to(out, R"(,"node":{},"peer":{},"from":)", m.node, m.peer);
            opt(b, m.from);
            fmt::format_to(out, R"(,"to":{},"stability_before":{},"stability_after":{})", m.to,
                           m.stability_before, m.stability_after);
          },
          [&](const Reelect& m) {
            fmt::format_to(out, R"(,"cluster":{},"old_head":{},"new_head":)", m.cluster,
                           m.old_head);
            opt(b, m.new_head);
            fmt::format_to(out, R"(,"trigger":"{}","observed":{},"limit":{})", m.trigger,
                           m.observed, m.limit);
          },
          [&](const PacketSend& m) {
            fmt::format_to(out, R"(,"src":{},"pkt":{})", m.src, m.pkt);
          },
          [&](const Debit& m) {
            fmt::format_to(out, R"(,"node":{},"cause":"{}","joules":{},"residual":{})", m.node,
                           m.cause, m.joules, m.residual);
          },
          [&](const AggregateForward& m) {
            fmt::format_to(out, R"(,"node":{},"packets":{},"hops":{},"delivered":{})", m.node,
                           m.packets, m.hops, m.delivered);
          },
          [&](const PacketDrop& m) {
            fmt::format_to(out, R"(,"pkt":{},"at":{},"reason":"{}")", m.pkt, m.at, m.reason);
          },
          [&](const PacketReceive& m) {
            fmt::format_to(out, R"(,"dst":{},"pkt":{},"created":{},"hops":{})", m.dst, m.pkt,
                           m.created_us, m.hops);
          },
          [&](const NodeDeath& m) { fmt::format_to(out, R"(,"node":{})", m.node); },
      },
      r.body);
  b.push_back('}');
  return fmt::to_string(b);
}

Record from_json(const nlohmann::json& j) {
  Record r;
  r.t = SimTime::micros(j.at("t").get<std::int64_t>());
  const std::string k = j.at("k").get<std::string>();
  if (k == "mobility") {
    r.body = MobilityUpdate{};
  } else if (k == "meeting") {
    r.body = Meeting{j.at("a").get<NodeId>(), j.at("b").get<NodeId>(),
                     opt_get<ClusterId>(j, "ca"), opt_get<ClusterId>(j, "cb")};
  } else if (k == "timeout") {
    r.body = ContactTimeout{j.at("node").get<NodeId>(), j.at("peer").get<NodeId>()};
  } else if (k == "round") {
    r.body = RoundBoundary{j.at("round").get<std::uint32_t>()};
  } else if (k == "cluster") {
    r.body = ClusterFormed{j.at("cluster").get<ClusterId>(),
                           j.at("head").get<NodeId>(),
                           j.at("members").get<std::vector<NodeId>>(),
                           j.at("far_zone").get<std::vector<NodeId>>(),
                           opt_get<NodeId>(j, "zone_head"),
                           j.at("hidden").get<bool>()};
  } else if (k == "sync") {
    r.body = Sync{j.at("a").get<NodeId>(), j.at("b").get<NodeId>()};
  } else if (k == "leave") {
    r.body = Leave{j.at("node").get<NodeId>(), j.at("cluster").get<ClusterId>(),
                   j.at("gateway_entries_after").get<std::size_t>()};
  } else if (k == "join") {
    r.body = Join{j.at("node").get<NodeId>(),          j.at("peer").get<NodeId>(),
                  opt_get<ClusterId>(j, "from"),         j.at("to").get<ClusterId>(),
                  j.at("stability_before").get<double>(), j.at("stability_after").get<double>()};
  } else if (k == "reelect") {
    r.body = Reelect{j.at("cluster").get<ClusterId>(), j.at("old_head").get<NodeId>(),
                     opt_get<NodeId>(j, "new_head"), j.at("trigger").get<std::string>(),
                     j.at("observed").get<double>(), j.at("limit").get<double>()};
  } else if (k == "send") {
    r.body = PacketSend{j.at("src").get<NodeId>(), j.at("pkt").get<std::uint64_t>()};
  } else if (k == "debit") {
    r.body = Debit{j.at("node").get<NodeId>(), j.at("cause").get<std::string>(),
                   j.at("joules").get<double>(), j.at("residual").get<double>()};
  } else if (k == "forward") {
    r.body = AggregateForward{j.at("node").get<NodeId>(), j.at("packets").get<std::uint32_t>(),
                              j.at("hops").get<std::uint32_t>(), j.at("delivered").get<bool>()};
  } else if (k == "drop") {
    r.body = PacketDrop{j.at("pkt").get<std::uint64_t>(), j.at("at").get<NodeId>(),
                        j.at("reason").get<std::string>()};
  } else if (k == "receive") {
    r.body = PacketReceive{j.at("dst").get<NodeId>(), j.at("pkt").get<std::uint64_t>(),
                           j.at("created").get<std::int64_t>(), j.at("hops").get<std::uint32_t>()};
  } else if (k == "death") {
    r.body = NodeDeath{j.at("node").get<NodeId>()};
  } else {
    throw std::runtime_error("unknown trace record kind '" + k + "'");
  }
  return r;
}

Record parse_line(std::string_view line) {
  return from_json(nlohmann::json::parse(line.begin(), line.end()));
}

void write(std::ostream& os, const nlohmann::json& config, const std::vector<Record>& records) {
  os << nlohmann::json{{"k", "header"}, {"config", config}}.dump() << '\n';
  for (const Record& r : records) os << to_line(r) << '\n';
}

TraceFile read(std::istream& is) {
  TraceFile tf;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      auto j = nlohmann::json::parse(line);
      if (lineno == 1 && j.value("k", "") == "header") {
        tf.config = j.at("config");
        continue;
      }
      tf.records.push_back(from_json(j));
    } catch (const std::exception& e) {
      throw std::runtime_error("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return tf;
}

void Hasher::feed(std::string_view s) {
  for (unsigned char c : s) {
    h_ ^= c;
    h_ *= 0x100000001b3ULL;
  }
}

void Hasher::add(const Record& r) {
  feed(to_line(r));
  feed("\n");
}

std::uint64_t hash(const std::vector<Record>& records) {
  Hasher h;
  for (const Record& r : records) h.add(r);
  return h.value();
}

}  // namespace wsn::trace
