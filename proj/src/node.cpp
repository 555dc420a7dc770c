#include "wsn/node.hpp"

#include <algorithm>
#include <cstdint>

#include "wsn/kernels.hpp"

namespace wsn {

std::string_view to_string(Role r) {
  switch (r) {
    case Role::Member:
      return "member";
    case Role::ClusterHead:
      return "cluster_head";
    case Role::ZoneHead:
      return "zone_head";
    case Role::Gateway:
      return "gateway";
    case Role::Sink:
      return "sink";
  }
  return "?";
}

Vec2 Area::clamp(Vec2 p) const {
  return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
}

void draw_leg(NodeState& node, const MobilityParams& params, const Area& area, Rng& rng) {
  node.waypoint = {rng.uniform(0.0, area.width), rng.uniform(0.0, area.height)};
  node.speed = rng.uniform(params.v_min, params.v_max);
}

NodeState advance_mobility(NodeState node, double dt_s, const MobilityParams& params,
                           const Area& area, Rng& rng) {
  double remaining = dt_s;
  // Bounded so a degenerate draw sequence cannot spin forever.
  for (int legs = 0; remaining > 0 && legs < 64; ++legs) {
    if (node.position == node.waypoint) {
      if (node.pause_remaining_s > 0) {
        const double wait = std::min(node.pause_remaining_s, remaining);
        node.pause_remaining_s -= wait;
        remaining -= wait;
        if (node.pause_remaining_s > 0) break;
        if (remaining <= 0) break;
      }
      draw_leg(node, params, area, rng);
      continue;
    }
    if (node.speed <= 0) break;

    const double dist = distance(node.position, node.waypoint);
    const double travel = node.speed * remaining;
    if (travel >= dist) {
      node.position = node.waypoint;
      remaining -= dist / node.speed;
      node.pause_remaining_s = params.pause_time_s;
    } else {
      const double f = travel / dist;
      node.position = area.clamp({node.position.x + (node.waypoint.x - node.position.x) * f,
                                  node.position.y + (node.waypoint.y - node.position.y) * f});
      remaining = 0;
    }
  }
  return node;
}

std::vector<NodePair> detect_meetings(std::span<const NodeState> nodes, double comm_range_m) {
  const std::size_t n = nodes.size();
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = nodes[i].position.x;
    ys[i] = nodes[i].position.y;
  }
  const double range_sq = comm_range_m * comm_range_m;
  std::vector<std::uint8_t> mask(n);
  std::vector<NodePair> pairs;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (!nodes[i].alive) continue;
    const std::size_t rest = n - i - 1;
    kernels::range_mask(xs[i], ys[i], std::span(xs).subspan(i + 1), std::span(ys).subspan(i + 1),
                        range_sq, std::span(mask).first(rest));
    for (std::size_t k = 0; k < rest; ++k) {
      const std::size_t j = i + 1 + k;
      if (mask[k] && nodes[j].alive) {
        pairs.emplace_back(nodes[i].node_id, nodes[j].node_id);
      }
    }
  }
  return pairs;
}

double tx_energy(double k_bits, double d_m, const RadioParams& radio) {
  return radio.e_elec_j_per_bit * k_bits + radio.eps_amp_j_per_bit_m2 * k_bits * d_m * d_m;
}

double rx_energy(double k_bits, const RadioParams& radio) {
  return radio.e_elec_j_per_bit * k_bits;
}

}  // namespace wsn
