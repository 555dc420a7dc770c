#pragma once

#include <map>
#include <optional>
#include <string>

#include "json.hpp"

#include "wsn/config.hpp"
#include "wsn/types.hpp"

namespace wsn {

/// A probability in [0, 1]. Construction outside the range is a contract
/// violation; arithmetic results are clamped back into range.
class ContactProbability {
 public:
  constexpr ContactProbability() = default;
  explicit ContactProbability(double v);

  static ContactProbability clamped(double v);

  constexpr double value() const { return value_; }
  auto operator<=>(const ContactProbability&) const = default;

 private:
  double value_ = 0.0;
};

enum class EmaTrigger { Transmission, Timeout };

/// Exponential moving average step for a contact/delivery probability.
///   Transmission: (1 - alpha) * xi_i + alpha * xi_k
///   Timeout:      (1 - alpha) * xi_i
/// Throws ContractViolation for Transmission without xi_k.
ContactProbability ema_update(ContactProbability xi_i, std::optional<ContactProbability> xi_k,
                              double alpha, EmaTrigger trigger);

struct ClusterTableEntry {
  NodeId node_id = 0;
  ContactProbability contact_probability;
  std::optional<ClusterId> cluster_id;
  SimTime time_stamp;
  bool operator==(const ClusterTableEntry&) const = default;
};

struct GatewayTableEntry {
  ClusterId cluster_id = 0;
  NodeId gateway = 0;
  ContactProbability contact_probability;
  SimTime time_stamp;
  bool operator==(const GatewayTableEntry&) const = default;
};

/// What one node knows about the network.
struct KnowledgeState {
  NodeId owner = 0;
  std::map<NodeId, ClusterTableEntry> cluster_table;
  std::map<ClusterId, GatewayTableEntry> gateway_table;
  std::optional<ClusterId> own_cluster_id;
  /// Last direct meeting per peer; local bookkeeping, never exchanged.
  std::map<NodeId, SimTime> last_meeting;

  double contact_with(NodeId peer) const {
    auto it = cluster_table.find(peer);
    return it == cluster_table.end() ? 0.0 : it->second.contact_probability.value();
  }
};

/// Insert/update the peer's cluster-table entry after a direct contact
/// (xi_k = 1). At most one update per peer per timestamp; returns false when
/// the call was deduplicated.
bool record_meeting(KnowledgeState& state, NodeId peer, std::optional<ClusterId> peer_cluster,
                    SimTime now, const EmaConfig& ema);

/// Decay the peer's entry by (1 - alpha). Returns false if there is no entry.
bool apply_timeout(KnowledgeState& state, NodeId peer, SimTime now, const EmaConfig& ema);

/// Two-sided knowledge update for a meeting between a and b: cluster-table
/// entries on both sides, plus gateway learning. A node that meets a peer
/// from another cluster (the sink counts as pseudo-cluster 0) becomes a
/// gateway towards it; a node also picks up a better sink-delivery
/// probability from a relay through the Transmission branch with the relay's
/// own probability. Returns false when deduplicated.
bool observe_meeting(KnowledgeState& a, KnowledgeState& b, SimTime now, const EmaConfig& ema);

/// Total order used to resolve conflicting entries: newer timestamp, then
/// higher probability, then lower cluster/gateway id.
bool supersedes(const ClusterTableEntry& x, const ClusterTableEntry& y);
bool supersedes(const GatewayTableEntry& x, const GatewayTableEntry& y);

/// Exchange and reconcile both tables. Afterward both hold the same entries
/// except that each excludes itself from its own cluster table.
void sync_tables(KnowledgeState& a, KnowledgeState& b);

std::optional<GatewayTableEntry> lookup_gateway(const KnowledgeState& state,
                                                ClusterId target_cluster);

/// Canonical form, keys sorted, suitable for byte comparison.
nlohmann::json to_json(const KnowledgeState& state);
std::string canonical(const KnowledgeState& state);

}  // namespace wsn
