#include "wsn/config.hpp"

#include <cmath>

namespace wsn {

std::string to_string(Protocol p) {
  switch (p) {
    case Protocol::Leach:
      return "LEACH";
    case Protocol::FarZone:
      return "FZ";
    case Protocol::OptimizedFarZone:
      return "OFZ";
  }
  return "?";
}

Protocol protocol_from_string(const std::string& s) {
  if (s == "LEACH") return Protocol::Leach;
  if (s == "FZ" || s == "FZ-LEACH") return Protocol::FarZone;
  if (s == "OFZ" || s == "OFZ-LEACH") return Protocol::OptimizedFarZone;
  throw ConfigError("protocol", "unknown protocol '" + s + "' (expected LEACH, FZ or OFZ)");
}

namespace {

void require(bool ok, const char* field, const char* constraint) {
  if (!ok) throw ConfigError(field, constraint);
}

bool finite(double v) { return std::isfinite(v); }

}  // namespace

void SimConfig::validate() const {
  require(finite(area_width_m) && area_width_m > 0, "area_width_m", "must be > 0");
  require(finite(area_height_m) && area_height_m > 0, "area_height_m", "must be > 0");
  require(node_count >= 2, "node_count", "must be >= 2 (at least one sensor plus the sink)");
  require(finite(comm_range_m) && comm_range_m > 0, "comm_range_m", "must be > 0");
  require(finite(sim_duration_s) && sim_duration_s >= 0, "sim_duration_s", "must be >= 0");
  require(finite(tick_s) && tick_s > 0, "tick_s", "must be > 0");
  require(finite(cbr_interval_s) && cbr_interval_s > 0, "cbr_interval_s", "must be > 0");
  require(packet_size_bits > 0, "packet_size_bits", "must be > 0");
  require(finite(initial_energy_j) && initial_energy_j > 0, "initial_energy_j", "must be > 0");

  const Vec2 s = sink();
  require(s.x >= 0 && s.x <= area_width_m && s.y >= 0 && s.y <= area_height_m,
          "sink_position", "must lie inside the field");
  if (!initial_positions.empty()) {
    require(initial_positions.size() == node_count - 1, "initial_positions",
            "must list exactly node_count - 1 sensor positions");
    for (const Vec2& p : initial_positions) {
      require(p.x >= 0 && p.x <= area_width_m && p.y >= 0 && p.y <= area_height_m,
              "initial_positions", "every position must lie inside the field");
    }
  }

  require(finite(mobility.v_min) && mobility.v_min >= 0, "mobility.v_min", "must be >= 0");
  require(finite(mobility.v_max) && mobility.v_max >= mobility.v_min, "mobility.v_max",
          "must be >= v_min");
  require(finite(mobility.pause_time_s) && mobility.pause_time_s >= 0, "mobility.pause_time_s",
          "must be >= 0");

  require(finite(radio.e_elec_j_per_bit) && radio.e_elec_j_per_bit >= 0, "radio.e_elec_j_per_bit",
          "must be >= 0");
  require(finite(radio.eps_amp_j_per_bit_m2) && radio.eps_amp_j_per_bit_m2 >= 0,
          "radio.eps_amp_j_per_bit_m2", "must be >= 0");
  require(finite(radio.e_idle_j_per_s) && radio.e_idle_j_per_s >= 0, "radio.e_idle_j_per_s",
          "must be >= 0");
  require(finite(radio.bitrate_bps) && radio.bitrate_bps > 0, "radio.bitrate_bps", "must be > 0");

  const ProtocolConfig& pc = protocol_params;
  require(finite(pc.ch_probability_p) && pc.ch_probability_p > 0 && pc.ch_probability_p <= 1,
          "protocol_params.ch_probability_p", "must be in (0, 1]");
  require(finite(pc.round_duration_s) && pc.round_duration_s > 0,
          "protocol_params.round_duration_s", "must be > 0");
  require(pc.membership_threshold_gamma >= 0 && pc.membership_threshold_gamma <= 1,
          "protocol_params.membership_threshold_gamma", "must be in [0, 1]");
  require(fz_threshold_j() >= 0 && finite(fz_threshold_j()),
          "protocol_params.fz_energy_threshold_j", "must be >= 0");
  require(ch_critical_j() >= 0 && finite(ch_critical_j()),
          "protocol_params.ch_critical_energy_j", "must be >= 0");
  require(pc.departure_threshold >= 0 && pc.departure_threshold <= 1,
          "protocol_params.departure_threshold", "must be in [0, 1]");

  require(ema.alpha >= 0 && ema.alpha <= 1, "ema.alpha", "must be in [0, 1]");
  require(finite(ema.timeout_s) && ema.timeout_s > 0, "ema.timeout_s", "must be > 0");
}

SimConfig SimConfig::resolved() const {
  SimConfig c = *this;
  c.sink_position = sink();
  c.protocol_params.fz_energy_threshold_j = fz_threshold_j();
  c.protocol_params.ch_critical_energy_j = ch_critical_j();
  return c;
}

}  // namespace wsn
