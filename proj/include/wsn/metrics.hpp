#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "wsn/config.hpp"
#include "wsn/types.hpp"

namespace wsn {

/// Cluster structure at one round boundary.
struct ClusterSnapshot {
  double time_s = 0;
  std::uint32_t round = 0;
  std::vector<std::uint32_t> member_counts;  // one per cluster, heads excluded
  std::uint32_t head_count = 0;
  std::uint32_t alive_sensors = 0;
};

/// Sampled once per tick for the time-axis plot series.
struct TimePoint {
  double time_s = 0;
  std::uint64_t sent = 0;
  std::uint64_t received = 0;
  double delivered_bytes = 0;
  double delay_sum_s = 0;
  double residual_energy_j = 0;  // sum over alive-or-dead sensors
  std::uint32_t alive_sensors = 0;
};

struct MetricsAccumulator {
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_received = 0;
  std::uint64_t sink_frames = 0;  // upstream transmissions that reached the sink
  std::vector<double> delays_s;
  std::vector<double> initial_energy_j;   // per node (sink entry unused)
  std::vector<double> residual_energy_j;  // per node
  std::vector<double> debited_j;          // per node, sum of debit events
  std::vector<double> death_times_s;      // sensor deaths in order
  std::uint32_t sensor_count = 0;
  std::vector<ClusterSnapshot> snapshots;
  std::vector<TimePoint> series;
  std::uint64_t joins = 0, leaves = 0, syncs = 0, reelections = 0, zone_heads = 0;
};

/// Packet delivery ratio in percent. Throws UndefinedMetric when sent == 0.
double pdr(std::uint64_t received, std::uint64_t sent);

/// Packets received per second. Throws UndefinedMetric for duration <= 0.
double throughput(std::uint64_t received, double duration_s);

/// Mean per-packet latency over delivered packets. Throws UndefinedMetric
/// when nothing was delivered.
double end_to_end_delay(std::span<const double> delays_s);

/// Time-weighted mean of (clustered members / cluster count); snapshots with
/// no clusters contribute 0. Each snapshot holds until the next one, the last
/// until `end_s`.
double avg_cluster_members(std::span<const ClusterSnapshot> snapshots, double end_s);

/// Time-weighted mean head count.
double avg_cluster_heads(std::span<const ClusterSnapshot> snapshots, double end_s);

struct EnergySummary {
  std::vector<double> per_node_j;
  double total_j = 0;
};

/// initial - residual per sensor.
EnergySummary energy_consumed(const MetricsAccumulator& acc);

struct Lifetime {
  double fnd_s = 0;
  double hnd_s = 0;
};

/// First-node-death and half-nodes-death times (sim end when not reached).
/// HND is the time of the ceil(n/2)-th sensor death.
Lifetime network_lifetime(std::span<const double> death_times_s, std::uint32_t sensor_count,
                          double sim_duration_s);

struct RunReport {
  std::string protocol;
  nlohmann::json config;
  std::uint64_t seed = 0;
  std::uint32_t node_count = 0;
  std::uint64_t packets_sent = 0;
  std::uint64_t packets_received = 0;
  std::uint64_t sink_frames = 0;
  double pdr_percent = 0;
  double mean_delay_s = 0;
  double throughput_pkts_per_s = 0;
  double throughput_literal_percent = 0;  // received/duration x 100
  double total_energy_j = 0;
  double avg_residual_energy_j = 0;
  double avg_cluster_members = 0;
  double avg_cluster_heads = 0;
  double lifetime_fnd_s = 0;
  double lifetime_hnd_s = 0;
  std::uint64_t joins = 0, leaves = 0, syncs = 0, reelections = 0, zone_heads = 0;
  std::uint64_t trace_hash = 0;
  std::vector<ClusterSnapshot> snapshots;
  std::vector<TimePoint> series;
};

/// Pure function of the accumulator. Undefined ratios (nothing sent or
/// delivered) are reported as 0.
RunReport build_report(const MetricsAccumulator& acc, const SimConfig& config);

nlohmann::json to_json(const RunReport& r);

/// Flat CSV: fixed, documented column order.
std::string csv_header();
std::string csv_row(const RunReport& r);

}  // namespace wsn
