#include "wsn/contact.hpp"

#include <algorithm>
#include <cmath>

namespace wsn {

ContactProbability::ContactProbability(double v) : value_(v) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw ContractViolation("contact probability out of [0,1]: " + std::to_string(v));
  }
}

ContactProbability ContactProbability::clamped(double v) {
  return ContactProbability(std::clamp(v, 0.0, 1.0));
}

ContactProbability ema_update(ContactProbability xi_i, std::optional<ContactProbability> xi_k,
                              double alpha, EmaTrigger trigger) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw ContractViolation("alpha out of [0,1]");
  if (trigger == EmaTrigger::Timeout) {
    return ContactProbability::clamped((1.0 - alpha) * xi_i.value());
  }
  if (!xi_k) throw ContractViolation("Transmission update requires the neighbour's probability");
  // Same operation order as kernels::ema_blend.
  const double keep = (1.0 - alpha) * xi_i.value();
  const double take = alpha * xi_k->value();
  return ContactProbability::clamped(keep + take);
}

bool record_meeting(KnowledgeState& state, NodeId peer, std::optional<ClusterId> peer_cluster,
                    SimTime now, const EmaConfig& ema) {
  if (peer == state.owner) throw ContractViolation("record_meeting: peer equals owner");
  auto [mit, fresh] = state.last_meeting.try_emplace(peer, now);
  if (!fresh) {
    if (mit->second == now) return false;
    mit->second = now;
  }
  auto it = state.cluster_table.find(peer);
  const ContactProbability before =
      it == state.cluster_table.end() ? ContactProbability{} : it->second.contact_probability;
  state.cluster_table[peer] = ClusterTableEntry{
      peer, ema_update(before, ContactProbability{1.0}, ema.alpha, EmaTrigger::Transmission),
      peer_cluster, now};
  return true;
}

bool apply_timeout(KnowledgeState& state, NodeId peer, SimTime now, const EmaConfig& ema) {
  auto it = state.cluster_table.find(peer);
  if (it == state.cluster_table.end()) return false;
  it->second.contact_probability =
      ema_update(it->second.contact_probability, std::nullopt, ema.alpha, EmaTrigger::Timeout);
  it->second.time_stamp = now;
  return true;
}

namespace {

std::optional<ClusterId> reachable_cluster(const KnowledgeState& s) {
  return s.owner == kSinkId ? std::optional<ClusterId>{kSinkCluster} : s.own_cluster_id;
}

struct MeetingView {
  std::optional<ClusterId> cluster;
  std::optional<double> sink_delivery;
};

MeetingView view_of(const KnowledgeState& s) {
  MeetingView v{reachable_cluster(s), std::nullopt};
  if (s.owner == kSinkId) {
    v.sink_delivery = 1.0;
  } else if (auto it = s.gateway_table.find(kSinkCluster); it != s.gateway_table.end()) {
    v.sink_delivery = it->second.contact_probability.value();
  }
  return v;
}

void learn_gateways(KnowledgeState& self, const MeetingView& mine, NodeId peer,
                    const MeetingView& theirs, SimTime now, const EmaConfig& ema) {
  if (self.owner == kSinkId) return;
  const auto prior = [&](ClusterId c) {
    auto it = self.gateway_table.find(c);
    return it == self.gateway_table.end() ? ContactProbability{} : it->second.contact_probability;
  };

  // Direct contact with another cluster (or the sink itself).
  if (theirs.cluster && theirs.cluster != mine.cluster) {
    const ClusterId target = *theirs.cluster;
    self.gateway_table[target] = GatewayTableEntry{
        target, self.owner,
        ema_update(prior(target), ContactProbability{1.0}, ema.alpha, EmaTrigger::Transmission),
        now};
    if (target == kSinkCluster) return;
  }

  // Transitive sink delivery through a better-placed relay.
  if (peer != kSinkId && theirs.sink_delivery &&
      (!mine.sink_delivery || *theirs.sink_delivery > *mine.sink_delivery)) {
    self.gateway_table[kSinkCluster] = GatewayTableEntry{
        kSinkCluster, peer,
        ema_update(prior(kSinkCluster), ContactProbability{*theirs.sink_delivery}, ema.alpha,
                   EmaTrigger::Transmission),
        now};
  }
}

}  // namespace

bool observe_meeting(KnowledgeState& a, KnowledgeState& b, SimTime now, const EmaConfig& ema) {
  const MeetingView va = view_of(a);
  const MeetingView vb = view_of(b);
  const bool ua = record_meeting(a, b.owner, vb.cluster, now, ema);
  const bool ub = record_meeting(b, a.owner, va.cluster, now, ema);
  if (ua) learn_gateways(a, va, b.owner, vb, now, ema);
  if (ub) learn_gateways(b, vb, a.owner, va, now, ema);
  return ua || ub;
}

bool supersedes(const ClusterTableEntry& x, const ClusterTableEntry& y) {
  if (x.time_stamp != y.time_stamp) return x.time_stamp > y.time_stamp;
  if (x.contact_probability != y.contact_probability) {
    return x.contact_probability > y.contact_probability;
  }
  // unset cluster sorts first
  return x.cluster_id < y.cluster_id;
}

bool supersedes(const GatewayTableEntry& x, const GatewayTableEntry& y) {
  if (x.time_stamp != y.time_stamp) return x.time_stamp > y.time_stamp;
  if (x.contact_probability != y.contact_probability) {
    return x.contact_probability > y.contact_probability;
  }
  return x.gateway < y.gateway;
}

namespace {

template <typename Map>
Map merged(const Map& x, const Map& y) {
  Map out = x;
  for (const auto& [key, entry] : y) {
    auto [it, inserted] = out.try_emplace(key, entry);
    if (!inserted && supersedes(entry, it->second)) it->second = entry;
  }
  return out;
}

}  // namespace

void sync_tables(KnowledgeState& a, KnowledgeState& b) {
  auto cluster = merged(a.cluster_table, b.cluster_table);
  auto gateway = merged(a.gateway_table, b.gateway_table);

  a.cluster_table = cluster;
  a.cluster_table.erase(a.owner);
  b.cluster_table = std::move(cluster);
  b.cluster_table.erase(b.owner);
  a.gateway_table = gateway;
  b.gateway_table = std::move(gateway);
}

std::optional<GatewayTableEntry> lookup_gateway(const KnowledgeState& state,
                                                ClusterId target_cluster) {
  auto it = state.gateway_table.find(target_cluster);
  if (it == state.gateway_table.end()) return std::nullopt;
  return it->second;
}

nlohmann::json to_json(const KnowledgeState& state) {
  using nlohmann::json;
  json ct = json::array();
  for (const auto& [id, e] : state.cluster_table) {
    ct.push_back({{"node_id", e.node_id},
                  {"contact_probability", e.contact_probability.value()},
                  {"cluster_id", e.cluster_id ? json(*e.cluster_id) : json(nullptr)},
                  {"time_stamp_us", e.time_stamp.us()}});
  }
  json gt = json::array();
  for (const auto& [id, e] : state.gateway_table) {
    gt.push_back({{"cluster_id", e.cluster_id},
                  {"gateway", e.gateway},
                  {"contact_probability", e.contact_probability.value()},
                  {"time_stamp_us", e.time_stamp.us()}});
  }
  return json{{"owner", state.owner},
              {"own_cluster_id", state.own_cluster_id ? json(*state.own_cluster_id) : json(nullptr)},
              {"cluster_table", std::move(ct)},
              {"gateway_table", std::move(gt)}};
}

std::string canonical(const KnowledgeState& state) { return to_json(state).dump(); }

}  // namespace wsn
