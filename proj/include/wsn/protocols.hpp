#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <vector>

#include "wsn/contact.hpp"
#include "wsn/node.hpp"
#include "wsn/types.hpp"

namespace wsn {

struct ClusterView {
  ClusterId cluster_id = 0;
  NodeId head = 0;
  std::set<NodeId> members;   // excludes the head
  std::set<NodeId> far_zone;  // subset of members
  /// Outside node serving a hidden cluster, when one is assigned.
  std::optional<NodeId> zone_head;
  bool hidden = false;

  bool contains(NodeId n) const { return n == head || members.contains(n); }
  std::size_t size() const { return members.size() + 1; }
  bool operator==(const ClusterView&) const = default;
};

/// The live partition of sensors into clusters.
class Clustering {
 public:
  Clustering() = default;
  explicit Clustering(std::vector<ClusterView> clusters) : clusters_(std::move(clusters)) {}

  std::vector<ClusterView>& clusters() { return clusters_; }
  const std::vector<ClusterView>& clusters() const { return clusters_; }

  ClusterView* find(ClusterId id);
  const ClusterView* find(ClusterId id) const;
  ClusterView* cluster_of(NodeId n);
  const ClusterView* cluster_of(NodeId n) const;
  bool is_head(NodeId n) const;
  bool is_zone_head(NodeId n) const;

  /// True iff every node appears at most once across heads and members.
  bool is_partition() const;

 private:
  std::vector<ClusterView> clusters_;
};

struct RoundState {
  std::uint32_t round_index = 0;
  std::vector<bool> was_ch_in_cycle;
};

/// ceil(1/p), the LEACH rotation period in rounds.
std::uint32_t rotation_period(double p);

/// LEACH election threshold: 0 once a node has served in the current cycle,
/// else p / (1 - p * (round mod ceil(1/p))).
double leach_ch_threshold(double p, std::uint32_t round_index, bool was_ch_in_cycle);

/// Each alive non-head sensor joins the nearest head within range (ties go
/// to the lower head id); the rest stay unclustered. Cluster ids are
/// assigned consecutively from `first_cluster_id` in head-id order.
std::vector<ClusterView> form_clusters(std::span<const NodeState> nodes,
                                       std::span<const NodeId> heads, double comm_range_m,
                                       ClusterId first_cluster_id);

/// Candidate's contact probability with every current member and the head
/// (itself excluded) is at least gamma. Vacuously true for an empty set.
bool membership_check(NodeId candidate, const ClusterView& cluster,
                      const KnowledgeState& candidate_tables, double gamma);

/// Minimum contact probability from `node` to the other members and the
/// head; 1.0 when there is nobody else.
double stability(NodeId node, const ClusterView& cluster, const KnowledgeState& tables);

/// Leave the current cluster: gateway table emptied, cluster id reset,
/// removed from the view. Returns false (no-op) if not clustered.
bool leave(KnowledgeState& state, Clustering& clustering);

struct JoinOutcome {
  bool joined = false;
  double stability_before = 0.0;
  double stability_after = 0.0;
  std::optional<ClusterId> from;
  ClusterId to = 0;
};

/// Join the peer's cluster iff the node passes the membership check of all
/// its current members and its stability strictly improves. An unclustered
/// node's current stability is 0. On success the gateway table is copied
/// from the peer and the cluster id updated.
JoinOutcome join(KnowledgeState& node, const KnowledgeState& peer, Clustering& clustering,
                 double gamma);

struct MeetingOutcome {
  bool synced = false;
  std::optional<NodeId> leaver;
  std::optional<ClusterId> left_cluster;
  std::optional<NodeId> joiner;
  std::optional<NodeId> join_peer;
  JoinOutcome join;
};

/// Cluster maintenance for a meeting between a and b.
///  - same cluster, both pass membership: sync tables
///  - same cluster, otherwise: the strictly less stable non-head leaves
///  - different clusters: each side (lower id first) may join the other's
/// Heads and zone heads never leave or join.
MeetingOutcome sync_on_meeting(KnowledgeState& a, KnowledgeState& b, Clustering& clustering,
                               double gamma);

using EnergyOf = std::function<double(NodeId)>;

struct FarZone {
  std::set<NodeId> far_zone;
  bool hidden = false;
};

/// Members whose residual energy is below the threshold. The cluster is
/// hidden when its head and every member are below it.
FarZone detect_far_zone(const ClusterView& cluster, const EnergyOf& energy, double fz_threshold_j);

class UnservedZone : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Eligible candidate (energy >= min_energy) with maximum residual energy,
/// ties to the lower id. Throws UnservedZone when nobody qualifies.
NodeId elect_zone_head(std::span<const NodeId> candidates, const EnergyOf& energy,
                       double min_energy_j = 0.0);

/// A falling head-to-member contact probability predicts the head is
/// leaving the cluster's coverage.
bool predict_ch_departure(const ClusterView& cluster, const KnowledgeState& head_tables,
                          double departure_threshold);

enum class ReelectTrigger { Departure, CriticalEnergy };

struct ReelectOutcome {
  NodeId old_head = 0;
  std::optional<NodeId> new_head;
  bool dissolved = false;
};

/// Promote the alive member with the most residual energy (ties to lower id).
/// The old head is demoted to member, or dropped from the cluster on
/// departure. With no alive member the cluster is dissolved (caller removes
/// it and unsets its nodes).
ReelectOutcome reelect_ch(ClusterView& cluster, const EnergyOf& energy,
                          const std::function<bool(NodeId)>& alive, ReelectTrigger trigger);

}  // namespace wsn
