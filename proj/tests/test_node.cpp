#include "doctest.h"

#include <vector>

#include "wsn/node.hpp"

using namespace wsn;

namespace {

NodeState at(NodeId id, double x, double y) {
  NodeState n;
  n.node_id = id;
  n.position = n.waypoint = {x, y};
  n.residual_energy_j = 1.0;
  return n;
}

}  // namespace

TEST_CASE("straight-line move arrives exactly on the waypoint") {
  NodeState n = at(1, 0, 0);
  n.waypoint = {3, 4};
  n.speed = 1.0;
  MobilityParams params{1.0, 1.0, 100.0};
  Rng rng(1);
  const NodeState after = advance_mobility(n, 5.0, params, Area{10, 10}, rng);
  CHECK(after.position.x == 3.0);
  CHECK(after.position.y == 4.0);
}

TEST_CASE("zero speed and zero dt leave the node in place") {
  NodeState n = at(1, 2, 2);
  n.waypoint = {8, 8};
  n.speed = 0.0;
  Rng rng(1);
  const MobilityParams params{0.0, 0.0, 0.0};
  CHECK(advance_mobility(n, 1000.0, params, Area{10, 10}, rng).position == n.position);
  n.speed = 2.0;
  const NodeState same = advance_mobility(n, 0.0, params, Area{10, 10}, rng);
  CHECK(same.position == n.position);
  CHECK(same.waypoint == n.waypoint);
}

TEST_CASE("random waypoint stays inside the field") {
  const Area area{1500, 300};
  const MobilityParams params{0.5, 5.0, 2.0};
  Rng rng(7);
  NodeState n = at(1, 10, 10);
  draw_leg(n, params, area, rng);
  for (int step = 0; step < 5000; ++step) {
    n = advance_mobility(n, 1.0, params, area, rng);
    REQUIRE(area.contains(n.position));
    REQUIRE(n.speed >= params.v_min);
    REQUIRE(n.speed <= params.v_max);
  }
}

TEST_CASE("meeting detection") {
  SUBCASE("same position") {
    std::vector<NodeState> nodes{at(0, 5, 5), at(1, 5, 5)};
    CHECK(detect_meetings(nodes, 1.0) == std::vector<NodePair>{{0, 1}});
  }
  SUBCASE("distance exactly the range is included") {
    std::vector<NodeState> nodes{at(0, 0, 0), at(1, 3, 4)};
    CHECK(detect_meetings(nodes, 5.0).size() == 1);
  }
  SUBCASE("just beyond the range is excluded") {
    std::vector<NodeState> nodes{at(0, 0, 0), at(1, 3, 4.0000001)};
    CHECK(detect_meetings(nodes, 5.0).empty());
  }
  SUBCASE("dead nodes never meet") {
    std::vector<NodeState> nodes{at(0, 0, 0), at(1, 1, 0), at(2, 2, 0)};
    nodes[1].alive = false;
    CHECK(detect_meetings(nodes, 5.0) == std::vector<NodePair>{{0, 2}});
  }
}

TEST_CASE("meetings are symmetric and sorted") {
  Rng rng(3);
  std::vector<NodeState> nodes;
  for (NodeId i = 0; i < 60; ++i) nodes.push_back(at(i, rng.uniform(0, 500), rng.uniform(0, 100)));
  const auto pairs = detect_meetings(nodes, 80.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    CHECK(pairs[k].first < pairs[k].second);
    if (k > 0) CHECK(pairs[k - 1] < pairs[k]);
  }
  // Brute force over both orders.
  std::size_t expect = 0;
  for (NodeId a = 0; a < nodes.size(); ++a)
    for (NodeId b = 0; b < nodes.size(); ++b)
      if (a != b && distance(nodes[a].position, nodes[b].position) <= 80.0) ++expect;
  CHECK(expect == 2 * pairs.size());
}

TEST_CASE("first-order radio energy") {
  RadioParams radio;  // 50 nJ/bit, 10 pJ/bit/m^2
  CHECK(tx_energy(0, 100, radio) == 0.0);
  CHECK(tx_energy(1000, 0, radio) == doctest::Approx(5.0e-5).epsilon(1e-12));
  CHECK(tx_energy(1000, 100, radio) == doctest::Approx(1.5e-4).epsilon(1e-12));
  CHECK(rx_energy(0, radio) == 0.0);
  CHECK(rx_energy(1000, radio) == doctest::Approx(5.0e-5).epsilon(1e-12));
}
