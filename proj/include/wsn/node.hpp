#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "wsn/config.hpp"
#include "wsn/rng.hpp"
#include "wsn/types.hpp"

namespace wsn {

enum class Role { Member, ClusterHead, ZoneHead, Gateway, Sink };

std::string_view to_string(Role r);

struct NodeState {
  NodeId node_id = 0;
  Vec2 position;
  Vec2 waypoint;
  double speed = 0.0;
  double pause_remaining_s = 0.0;
  double residual_energy_j = 0.0;
  Role role = Role::Member;
  std::optional<ClusterId> cluster_id;
  bool alive = true;

  bool is_sink() const { return role == Role::Sink; }
};

struct Area {
  double width = 0.0;
  double height = 0.0;
  bool contains(Vec2 p) const { return p.x >= 0 && p.x <= width && p.y >= 0 && p.y <= height; }
  Vec2 clamp(Vec2 p) const;
};

/// Random-waypoint step. Moves toward the waypoint at constant speed,
/// snapping onto it on arrival, pauses, then draws a fresh waypoint uniform
/// in the area and a speed uniform in [v_min, v_max]. A zero-speed node
/// never moves.
NodeState advance_mobility(NodeState node, double dt_s, const MobilityParams& params,
                           const Area& area, Rng& rng);

/// Draw a waypoint and speed for a node that has none yet.
void draw_leg(NodeState& node, const MobilityParams& params, const Area& area, Rng& rng);

using NodePair = std::pair<NodeId, NodeId>;

/// Unordered in-range pairs (a < b) among alive nodes, inclusive boundary,
/// sorted lexicographically. `nodes[i].node_id` must equal i.
std::vector<NodePair> detect_meetings(std::span<const NodeState> nodes, double comm_range_m);

/// Energy to transmit k bits over d metres: e_elec*k + eps_amp*k*d^2.
double tx_energy(double k_bits, double d_m, const RadioParams& radio);

/// Energy to receive k bits: e_elec*k.
double rx_energy(double k_bits, const RadioParams& radio);

}  // namespace wsn
