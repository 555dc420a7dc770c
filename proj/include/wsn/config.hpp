#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wsn/types.hpp"

namespace wsn {

struct MobilityParams {
  double v_min = 0.5;
  double v_max = 5.0;
  double pause_time_s = 2.0;
};

/// First-order radio model. `bitrate_bps` only sets per-hop latency.
struct RadioParams {
  double e_elec_j_per_bit = 50e-9;
  double eps_amp_j_per_bit_m2 = 10e-12;
  double e_idle_j_per_s = 0.0;
  double bitrate_bps = 250e3;
};

struct EmaConfig {
  double alpha = 0.3;
  double timeout_s = 10.0;
};

struct ProtocolConfig {
  double ch_probability_p = 0.1;
  double round_duration_s = 20.0;
  double membership_threshold_gamma = 0.4;
  // Energy thresholds in joules. Unset means "fraction of initial energy"
  // (10% and 5% respectively), resolved by SimConfig::resolved().
  std::optional<double> fz_energy_threshold_j;
  std::optional<double> ch_critical_energy_j;
  double departure_threshold = 0.3;
};

struct SimConfig {
  double area_width_m = 1500.0;
  double area_height_m = 300.0;
  std::uint32_t node_count = 50;
  double comm_range_m = 250.0;
  double sim_duration_s = 600.0;
  double tick_s = 1.0;
  double cbr_interval_s = 1.0;
  std::uint32_t packet_size_bits = 2000;
  double initial_energy_j = 0.5;
  std::uint64_t rng_seed = 1;
  /// Defaults to the field center.
  std::optional<Vec2> sink_position;
  /// Optional explicit sensor placement (node ids 1..n-1, in order).
  std::vector<Vec2> initial_positions;
  bool record_trace = true;

  MobilityParams mobility;
  RadioParams radio;
  Protocol protocol = Protocol::OptimizedFarZone;
  ProtocolConfig protocol_params;
  EmaConfig ema;

  /// Throws ConfigError naming the first offending field.
  void validate() const;

  /// Copy with every optional default filled in.
  SimConfig resolved() const;

  Vec2 sink() const {
    return sink_position.value_or(Vec2{area_width_m / 2.0, area_height_m / 2.0});
  }
  double fz_threshold_j() const {
    return protocol_params.fz_energy_threshold_j.value_or(0.10 * initial_energy_j);
  }
  double ch_critical_j() const {
    return protocol_params.ch_critical_energy_j.value_or(0.05 * initial_energy_j);
  }
};

}  // namespace wsn
