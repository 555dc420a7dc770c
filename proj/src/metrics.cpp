#include "wsn/metrics.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "wsn/config_io.hpp"

namespace wsn {

double pdr(std::uint64_t received, std::uint64_t sent) {
  if (sent == 0) throw UndefinedMetric("PDR undefined: no packets sent");
  return static_cast<double>(received) / static_cast<double>(sent) * 100.0;
}

double throughput(std::uint64_t received, double duration_s) {
  if (!(duration_s > 0)) throw UndefinedMetric("throughput undefined: zero duration");
  return static_cast<double>(received) / duration_s;
}

double end_to_end_delay(std::span<const double> delays_s) {
  if (delays_s.empty()) throw UndefinedMetric("delay undefined: no delivered packets");
  double sum = 0;
  for (double d : delays_s) sum += d;
  return sum / static_cast<double>(delays_s.size());
}

namespace {

template <typename F>
double time_weighted(std::span<const ClusterSnapshot> snaps, double end_s, F value) {
  double num = 0, den = 0;
  for (std::size_t i = 0; i < snaps.size(); ++i) {
    const double until = i + 1 < snaps.size() ? snaps[i + 1].time_s : end_s;
    const double w = std::max(0.0, until - snaps[i].time_s);
    num += w * value(snaps[i]);
    den += w;
  }
  return den > 0 ? num / den : 0.0;
}

}  // namespace

double avg_cluster_members(std::span<const ClusterSnapshot> snapshots, double end_s) {
  return time_weighted(snapshots, end_s, [](const ClusterSnapshot& s) {
    if (s.member_counts.empty()) return 0.0;
    const double total = std::accumulate(s.member_counts.begin(), s.member_counts.end(), 0.0);
    return total / static_cast<double>(s.member_counts.size());
  });
}

double avg_cluster_heads(std::span<const ClusterSnapshot> snapshots, double end_s) {
  return time_weighted(snapshots, end_s,
                       [](const ClusterSnapshot& s) { return static_cast<double>(s.head_count); });
}

EnergySummary energy_consumed(const MetricsAccumulator& acc) {
  EnergySummary out;
  out.per_node_j.assign(acc.initial_energy_j.size(), 0.0);
  for (std::size_t i = 1; i < acc.initial_energy_j.size(); ++i) {
    out.per_node_j[i] = acc.initial_energy_j[i] - acc.residual_energy_j[i];
    out.total_j += out.per_node_j[i];
  }
  return out;
}

Lifetime network_lifetime(std::span<const double> death_times_s, std::uint32_t sensor_count,
                          double sim_duration_s) {
  std::vector<double> d(death_times_s.begin(), death_times_s.end());
  std::sort(d.begin(), d.end());
  Lifetime out{sim_duration_s, sim_duration_s};
  if (!d.empty()) out.fnd_s = d.front();
  const std::size_t half = (sensor_count + 1) / 2;
  if (half >= 1 && d.size() >= half) out.hnd_s = d[half - 1];
  return out;
}

RunReport build_report(const MetricsAccumulator& acc, const SimConfig& config) {
  RunReport r;
  r.protocol = to_string(config.protocol);
  r.config = config_to_json(config.resolved());
  r.seed = config.rng_seed;
  r.node_count = config.node_count;
  r.packets_sent = acc.packets_sent;
  r.packets_received = acc.packets_received;
  r.sink_frames = acc.sink_frames;
  r.pdr_percent = acc.packets_sent ? pdr(acc.packets_received, acc.packets_sent) : 0.0;
  r.mean_delay_s = acc.delays_s.empty() ? 0.0 : end_to_end_delay(acc.delays_s);
  r.throughput_pkts_per_s =
      config.sim_duration_s > 0 ? throughput(acc.packets_received, config.sim_duration_s) : 0.0;
  r.throughput_literal_percent = r.throughput_pkts_per_s * 100.0;

  const EnergySummary e = energy_consumed(acc);
  r.total_energy_j = e.total_j;
  if (acc.sensor_count > 0) {
    double residual = 0;
    for (std::size_t i = 1; i < acc.residual_energy_j.size(); ++i)
      residual += acc.residual_energy_j[i];
    r.avg_residual_energy_j = residual / acc.sensor_count;
  }
  r.avg_cluster_members = avg_cluster_members(acc.snapshots, config.sim_duration_s);
  r.avg_cluster_heads = avg_cluster_heads(acc.snapshots, config.sim_duration_s);
  const Lifetime lt = network_lifetime(acc.death_times_s, acc.sensor_count, config.sim_duration_s);
  r.lifetime_fnd_s = lt.fnd_s;
  r.lifetime_hnd_s = lt.hnd_s;
  r.joins = acc.joins;
  r.leaves = acc.leaves;
  r.syncs = acc.syncs;
  r.reelections = acc.reelections;
  r.zone_heads = acc.zone_heads;
  r.snapshots = acc.snapshots;
  r.series = acc.series;
  return r;
}

nlohmann::json to_json(const RunReport& r) {
  using nlohmann::json;
  json snaps = json::array();
  for (const auto& s : r.snapshots) {
    snaps.push_back({{"time_s", s.time_s},
                     {"round", s.round},
                     {"member_counts", s.member_counts},
                     {"head_count", s.head_count},
                     {"alive_sensors", s.alive_sensors}});
  }
  json series = json::array();
  for (const auto& p : r.series) {
    series.push_back({{"time_s", p.time_s},
                      {"sent", p.sent},
                      {"received", p.received},
                      {"delivered_bytes", p.delivered_bytes},
                      {"delay_sum_s", p.delay_sum_s},
                      {"residual_energy_j", p.residual_energy_j},
                      {"alive_sensors", p.alive_sensors}});
  }
  return json{{"protocol", r.protocol},
              {"seed", r.seed},
              {"node_count", r.node_count},
              {"config", r.config},
              {"packets_sent", r.packets_sent},
              {"packets_received", r.packets_received},
              {"sink_frames", r.sink_frames},
              {"pdr_percent", r.pdr_percent},
              {"mean_delay_s", r.mean_delay_s},
              {"throughput_pkts_per_s", r.throughput_pkts_per_s},
              {"throughput_literal_percent", r.throughput_literal_percent},
              {"total_energy_j", r.total_energy_j},
              {"avg_residual_energy_j", r.avg_residual_energy_j},
              {"avg_cluster_members", r.avg_cluster_members},
              {"avg_cluster_heads", r.avg_cluster_heads},
              {"lifetime_fnd_s", r.lifetime_fnd_s},
              {"lifetime_hnd_s", r.lifetime_hnd_s},
              {"joins", r.joins},
              {"leaves", r.leaves},
              {"syncs", r.syncs},
              {"reelections", r.reelections},
              {"zone_heads", r.zone_heads},
              {"trace_hash", fmt::format("{:016x}", r.trace_hash)},
              {"snapshots", std::move(snaps)},
              {"series", std::move(series)}};
}

std::string csv_header() {
  return "protocol,seed,node_count,packets_sent,packets_received,sink_frames,pdr_percent,"
         "mean_delay_s,throughput_pkts_per_s,throughput_literal_percent,total_energy_j,"
         "avg_residual_energy_j,avg_cluster_members,avg_cluster_heads,lifetime_fnd_s,"
         "lifetime_hnd_s,joins,leaves,syncs,reelections,zone_heads,trace_hash";
}

std::string csv_row(const RunReport& r) {
  return fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:016x}",
                     r.protocol, r.seed, r.node_count, r.packets_sent, r.packets_received,
                     r.sink_frames, r.pdr_percent, r.mean_delay_s, r.throughput_pkts_per_s,
                     r.throughput_literal_percent, r.total_energy_j, r.avg_residual_energy_j,
                     r.avg_cluster_members, r.avg_cluster_heads, r.lifetime_fnd_s,
                     r.lifetime_hnd_s, r.joins, r.leaves, r.syncs, r.reelections, r.zone_heads,
                     r.trace_hash);
}

}  // namespace wsn
