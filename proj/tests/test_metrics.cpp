#include "doctest.h"

#include <algorithm>
#include <vector>

#include "wsn/metrics.hpp"
#include "wsn/node.hpp"

using namespace wsn;

namespace {

ClusterSnapshot snap(double t, std::vector<std::uint32_t> sizes) {
  ClusterSnapshot s;
  s.time_s = t;
  s.member_counts = sizes;
  s.head_count = static_cast<std::uint32_t>(sizes.size());
  return s;
}

}  // namespace

TEST_CASE("pdr") {
  CHECK(pdr(90, 100) == 90.0);
  CHECK(pdr(0, 100) == 0.0);
  CHECK(pdr(100, 100) == 100.0);
  CHECK_THROWS_AS(pdr(0, 0), UndefinedMetric);
}

TEST_CASE("throughput") {
  CHECK(throughput(100, 10) == 10.0);
  CHECK(throughput(0, 10) == 0.0);
  CHECK(throughput(1, 1) == 1.0);
  CHECK_THROWS_AS(throughput(5, 0), UndefinedMetric);
}

TEST_CASE("end_to_end_delay") {
  const std::vector<double> one{1.5 - 1.0};
  CHECK(end_to_end_delay(one) == 0.5);
  const std::vector<double> two{0.2, 0.4};
  CHECK(end_to_end_delay(two) == doctest::Approx(0.3));
  const std::vector<double> zero{0.0};
  CHECK(end_to_end_delay(zero) == 0.0);
  CHECK_THROWS_AS(end_to_end_delay({}), UndefinedMetric);
}

TEST_CASE("cluster averages are time weighted") {
  const std::vector<ClusterSnapshot> constant{snap(0, {3, 5})};
  CHECK(avg_cluster_members(constant, 100) == 4.0);
  const std::vector<ClusterSnapshot> seven{snap(0, {7})};
  CHECK(avg_cluster_members(seven, 100) == 7.0);
  const std::vector<ClusterSnapshot> halves{snap(0, {4}), snap(50, {2})};
  CHECK(avg_cluster_members(halves, 100) == 3.0);

  const std::vector<ClusterSnapshot> five{snap(0, {1, 1, 1, 1, 1})};
  CHECK(avg_cluster_heads(five, 60) == 5.0);
  const std::vector<ClusterSnapshot> none{snap(0, {})};
  CHECK(avg_cluster_heads(none, 60) == 0.0);
  CHECK(avg_cluster_members(none, 60) == 0.0);
  const std::vector<ClusterSnapshot> four_six{snap(0, {1, 1, 1, 1}), snap(30, {1, 1, 1, 1, 1, 1})};
  CHECK(avg_cluster_heads(four_six, 60) == 5.0);
  CHECK(avg_cluster_heads({}, 60) == 0.0);
}

TEST_CASE("energy_consumed") {
  MetricsAccumulator acc;
  acc.sensor_count = 2;
  acc.initial_energy_j = {0, 0.5, 0.5};
  acc.residual_energy_j = acc.initial_energy_j;
  CHECK(energy_consumed(acc).total_j == 0.0);

  const RadioParams radio;
  acc.residual_energy_j[1] -= tx_energy(1000, 0, radio);
  acc.residual_energy_j[2] -= rx_energy(1000, radio);
  CHECK(energy_consumed(acc).total_j == doctest::Approx(1.0e-4).epsilon(1e-12));

  acc.residual_energy_j[2] = 0.0;  // dead: clamped at zero
  CHECK(energy_consumed(acc).per_node_j[2] == 0.5);
}

TEST_CASE("network_lifetime") {
  const Lifetime none = network_lifetime({}, 4, 600);
  CHECK(none.fnd_s == 600);
  CHECK(none.hnd_s == 600);
  const std::vector<double> deaths{30, 10, 40, 20};
  const Lifetime l = network_lifetime(deaths, 4, 600);
  CHECK(l.fnd_s == 10);
  CHECK(l.hnd_s == 20);
  const std::vector<double> one{7};
  CHECK(network_lifetime(one, 4, 600).hnd_s == 600);
  CHECK(network_lifetime(one, 1, 600).hnd_s == 7);
}

TEST_CASE("build_report") {
  SimConfig c;
  c.sim_duration_s = 10;
  MetricsAccumulator acc;
  acc.sensor_count = 1;
  acc.initial_energy_j = {0, 0.5};
  acc.residual_energy_j = {0, 0.25};
  acc.packets_sent = 4;
  acc.packets_received = 3;
  acc.delays_s = {0.1, 0.2, 0.3};
  const RunReport r = build_report(acc, c);
  CHECK(r.pdr_percent == 75.0);
  CHECK(r.throughput_pkts_per_s == 0.3);
  CHECK(r.throughput_literal_percent == doctest::Approx(30.0));
  CHECK(r.mean_delay_s == doctest::Approx(0.2));
  CHECK(r.total_energy_j == 0.25);
  CHECK(r.avg_residual_energy_j == 0.25);

  MetricsAccumulator empty;
  const RunReport z = build_report(empty, c);
  CHECK(z.pdr_percent == 0.0);
  CHECK(z.mean_delay_s == 0.0);
}

TEST_CASE("csv row matches header") {
  const RunReport r = build_report(MetricsAccumulator{}, SimConfig{});
  const auto commas = [](const std::string& s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(commas(csv_header()) == commas(csv_row(r)));
  const auto j = to_json(r);
  CHECK(j.at("protocol") == "OFZ");
  CHECK(j.at("trace_hash").get<std::string>().size() == 16);
}
