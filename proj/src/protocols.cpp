#include "wsn/protocols.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace wsn {

ClusterView* Clustering::find(ClusterId id) {
  for (auto& c : clusters_)
    if (c.cluster_id == id) return &c;
  return nullptr;
}

const ClusterView* Clustering::find(ClusterId id) const {
  return const_cast<Clustering*>(this)->find(id);
}

ClusterView* Clustering::cluster_of(NodeId n) {
  for (auto& c : clusters_)
    if (c.contains(n)) return &c;
  return nullptr;
}

const ClusterView* Clustering::cluster_of(NodeId n) const {
  return const_cast<Clustering*>(this)->cluster_of(n);
}

bool Clustering::is_head(NodeId n) const {
  return std::any_of(clusters_.begin(), clusters_.end(),
                     [n](const ClusterView& c) { return c.head == n; });
}

bool Clustering::is_zone_head(NodeId n) const {
  return std::any_of(clusters_.begin(), clusters_.end(),
                     [n](const ClusterView& c) { return c.zone_head == n; });
}

bool Clustering::is_partition() const {
  std::set<NodeId> seen;
  for (const auto& c : clusters_) {
    if (!seen.insert(c.head).second) return false;
    for (NodeId m : c.members)
      if (!seen.insert(m).second) return false;
    if (c.members.contains(c.head)) return false;
    if (!std::includes(c.members.begin(), c.members.end(), c.far_zone.begin(), c.far_zone.end()))
      return false;
  }
  return true;
}

std::uint32_t rotation_period(double p) {
  return static_cast<std::uint32_t>(std::ceil(1.0 / p - 1e-9));
}

double leach_ch_threshold(double p, std::uint32_t round_index, bool was_ch_in_cycle) {
  if (was_ch_in_cycle) return 0.0;
  const std::uint32_t phase = round_index % rotation_period(p);
  return p / (1.0 - p * static_cast<double>(phase));
}

std::vector<ClusterView> form_clusters(std::span<const NodeState> nodes,
                                       std::span<const NodeId> heads, double comm_range_m,
                                       ClusterId first_cluster_id) {
  std::vector<NodeId> sorted_heads(heads.begin(), heads.end());
  std::sort(sorted_heads.begin(), sorted_heads.end());

  std::vector<ClusterView> clusters;
  clusters.reserve(sorted_heads.size());
  ClusterId next = first_cluster_id;
  for (NodeId h : sorted_heads) clusters.push_back(ClusterView{next++, h, {}, {}, {}, false});

  const double range_sq = comm_range_m * comm_range_m;
  for (const NodeState& n : nodes) {
    if (!n.alive || n.is_sink()) continue;
    if (std::binary_search(sorted_heads.begin(), sorted_heads.end(), n.node_id)) continue;
    std::size_t best = clusters.size();
    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      const double d2 = squared_distance(n.position, nodes[clusters[i].head].position);
      // strict < keeps the lower head id on ties (heads are sorted)
      if (d2 <= range_sq && d2 < best_d2) {
        best = i;
        best_d2 = d2;
      }
    }
    if (best < clusters.size()) clusters[best].members.insert(n.node_id);
  }
  return clusters;
}

namespace {

template <typename F>
void for_each_other(NodeId self, const ClusterView& cluster, F&& f) {
  if (cluster.head != self) f(cluster.head);
  for (NodeId m : cluster.members)
    if (m != self) f(m);
}

}  // namespace

bool membership_check(NodeId candidate, const ClusterView& cluster,
                      const KnowledgeState& candidate_tables, double gamma) {
  bool ok = true;
  for_each_other(candidate, cluster, [&](NodeId other) {
    if (candidate_tables.contact_with(other) < gamma) ok = false;
  });
  return ok;
}

double stability(NodeId node, const ClusterView& cluster, const KnowledgeState& tables) {
  double s = 1.0;
  for_each_other(node, cluster, [&](NodeId other) { s = std::min(s, tables.contact_with(other)); });
  return s;
}

bool leave(KnowledgeState& state, Clustering& clustering) {
  ClusterView* c = clustering.cluster_of(state.owner);
  if (c == nullptr) return false;
  if (c->head == state.owner) throw ContractViolation("a cluster head cannot leave its cluster");
  c->members.erase(state.owner);
  c->far_zone.erase(state.owner);
  state.gateway_table.clear();
  state.own_cluster_id.reset();
  return true;
}

JoinOutcome join(KnowledgeState& node, const KnowledgeState& peer, Clustering& clustering,
                 double gamma) {
  JoinOutcome out;
  ClusterView* target = clustering.cluster_of(peer.owner);
  if (target == nullptr) throw ContractViolation("join: target peer is not clustered");
  out.to = target->cluster_id;

  ClusterView* current = clustering.cluster_of(node.owner);
  if (current == target) return out;
  if (current != nullptr) out.from = current->cluster_id;
  out.stability_before = current != nullptr ? stability(node.owner, *current, node) : 0.0;

  if (!membership_check(node.owner, *target, node, gamma)) return out;
  out.stability_after = stability(node.owner, *target, node);
  if (!(out.stability_after > out.stability_before)) return out;

  if (current != nullptr) {
    current->members.erase(node.owner);
    current->far_zone.erase(node.owner);
  }
  target->members.insert(node.owner);
  node.gateway_table = peer.gateway_table;
  node.own_cluster_id = target->cluster_id;
  out.joined = true;
  return out;
}

MeetingOutcome sync_on_meeting(KnowledgeState& a, KnowledgeState& b, Clustering& clustering,
                               double gamma) {
  MeetingOutcome out;
  ClusterView* ca = clustering.cluster_of(a.owner);
  ClusterView* cb = clustering.cluster_of(b.owner);
  if (ca == nullptr && cb == nullptr) return out;

  const auto pinned = [&](NodeId n) { return clustering.is_head(n) || clustering.is_zone_head(n); };

  if (ca == cb) {
    const bool pass_a = membership_check(a.owner, *ca, a, gamma);
    const bool pass_b = membership_check(b.owner, *cb, b, gamma);
    if (pass_a && pass_b) {
      sync_tables(a, b);
      out.synced = true;
      return out;
    }
    const double sa = stability(a.owner, *ca, a);
    const double sb = stability(b.owner, *cb, b);
    KnowledgeState* loser = sa < sb ? &a : (sb < sa ? &b : nullptr);
    if (loser != nullptr && !pinned(loser->owner)) {
      out.left_cluster = ca->cluster_id;
      leave(*loser, clustering);
      out.leaver = loser->owner;
    }
    return out;
  }

  const auto try_join = [&](KnowledgeState& who, const KnowledgeState& peer) {
    if (pinned(who.owner) || clustering.cluster_of(peer.owner) == nullptr) return false;
    JoinOutcome j = join(who, peer, clustering, gamma);
    if (!j.joined) return false;
    out.joiner = who.owner;
    out.join_peer = peer.owner;
    out.join = j;
    return true;
  };
  if (!try_join(a, b)) try_join(b, a);
  return out;
}

FarZone detect_far_zone(const ClusterView& cluster, const EnergyOf& energy, double fz_threshold_j) {
  FarZone out;
  for (NodeId m : cluster.members)
    if (energy(m) < fz_threshold_j) out.far_zone.insert(m);
  out.hidden = energy(cluster.head) < fz_threshold_j && out.far_zone.size() == cluster.members.size();
  return out;
}

NodeId elect_zone_head(std::span<const NodeId> candidates, const EnergyOf& energy,
                       double min_energy_j) {
  std::optional<NodeId> best;
  double best_e = -std::numeric_limits<double>::infinity();
  for (NodeId c : candidates) {
    const double e = energy(c);
    if (e < min_energy_j) continue;
    if (e > best_e || (e == best_e && best && c < *best)) {
      best = c;
      best_e = e;
    }
  }
  if (!best) throw UnservedZone("no eligible zone-head candidate");
  return *best;
}

bool predict_ch_departure(const ClusterView& cluster, const KnowledgeState& head_tables,
                          double departure_threshold) {
  return stability(cluster.head, cluster, head_tables) < departure_threshold;
}

ReelectOutcome reelect_ch(ClusterView& cluster, const EnergyOf& energy,
                          const std::function<bool(NodeId)>& alive, ReelectTrigger trigger) {
  ReelectOutcome out;
  out.old_head = cluster.head;
  std::optional<NodeId> best;
  double best_e = -std::numeric_limits<double>::infinity();
  for (NodeId m : cluster.members) {  // ascending ids: strict > keeps the lower id
    if (!alive(m)) continue;
    const double e = energy(m);
    if (e > best_e) {
      best = m;
      best_e = e;
    }
  }
  if (!best) {
    out.dissolved = true;
    return out;
  }
  cluster.members.erase(*best);
  cluster.far_zone.erase(*best);
  cluster.head = *best;
  if (trigger == ReelectTrigger::CriticalEnergy && alive(out.old_head)) {
    cluster.members.insert(out.old_head);
  }
  out.new_head = *best;
  return out;
}

}  // namespace wsn
