#include "wsn/config_io.hpp"

#include <functional>
#include <map>

namespace wsn {

using nlohmann::json;

namespace {

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    if constexpr (std::is_same_v<T, double>) {
      if (!v.is_number()) throw ConfigError(key, "expected a number");
    } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
      if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ConfigError(key, "expected an integer");
      if (v.is_number_integer() && v.get<std::int64_t>() < 0)
        throw ConfigError(key, "must be non-negative");
    } else if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(key, "expected true or false");
    }
    return v.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(key, e.what());
  }
}

Vec2 get_vec(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 2) throw ConfigError(key, "expected [x, y]");
  return {get_as<double>(v[0], key), get_as<double>(v[1], key)};
}

using Setter = std::function<void(const json&)>;

void apply(const json& j, const std::string& prefix, const std::map<std::string, Setter>& setters,
           const std::set<std::string>& ignored) {
  if (!j.is_object()) throw ConfigError(prefix.empty() ? "<root>" : prefix, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (ignored.contains(key)) continue;
    const std::string full = prefix.empty() ? key : prefix + "." + key;
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(full, "unknown key");
    it->second(value);
  }
}

}  // namespace

json config_to_json(const SimConfig& c) {
  json positions = json::array();
  for (const Vec2& p : c.initial_positions) positions.push_back({p.x, p.y});
  const Vec2 sink = c.sink();
  return json{
      {"area_width_m", c.area_width_m},
      {"area_height_m", c.area_height_m},
      {"node_count", c.node_count},
      {"comm_range_m", c.comm_range_m},
      {"sim_duration_s", c.sim_duration_s},
      {"tick_s", c.tick_s},
      {"cbr_interval_s", c.cbr_interval_s},
      {"packet_size_bits", c.packet_size_bits},
      {"initial_energy_j", c.initial_energy_j},
      {"rng_seed", c.rng_seed},
      {"sink_position", {sink.x, sink.y}},
      {"initial_positions", positions},
      {"record_trace", c.record_trace},
      {"protocol", to_string(c.protocol)},
      {"mobility",
       {{"v_min", c.mobility.v_min},
        {"v_max", c.mobility.v_max},
        {"pause_time_s", c.mobility.pause_time_s}}},
      {"radio",
       {{"e_elec_j_per_bit", c.radio.e_elec_j_per_bit},
        {"eps_amp_j_per_bit_m2", c.radio.eps_amp_j_per_bit_m2},
        {"e_idle_j_per_s", c.radio.e_idle_j_per_s},
        {"bitrate_bps", c.radio.bitrate_bps}}},
      {"protocol_params",
       {{"ch_probability_p", c.protocol_params.ch_probability_p},
        {"round_duration_s", c.protocol_params.round_duration_s},
        {"membership_threshold_gamma", c.protocol_params.membership_threshold_gamma},
        {"fz_energy_threshold_j", opt(c.protocol_params.fz_energy_threshold_j)},
        {"ch_critical_energy_j", opt(c.protocol_params.ch_critical_energy_j)},
        {"departure_threshold", c.protocol_params.departure_threshold}}},
      {"ema", {{"alpha", c.ema.alpha}, {"timeout_s", c.ema.timeout_s}}},
  };
}

SimConfig config_from_json(const json& j, SimConfig base, const std::set<std::string>& ignored) {
  SimConfig& c = base;
  const auto num = [](double& field, const char* key) {
    return [&field, key](const json& v) { field = get_as<double>(v, key); };
  };
  const auto opt_num = [](std::optional<double>& field, const char* key) {
    return [&field, key](const json& v) {
      if (v.is_null())
        field.reset();
      else
        field = get_as<double>(v, key);
    };
  };

  std::map<std::string, Setter> mobility{
      {"v_min", num(c.mobility.v_min, "mobility.v_min")},
      {"v_max", num(c.mobility.v_max, "mobility.v_max")},
      {"pause_time_s", num(c.mobility.pause_time_s, "mobility.pause_time_s")},
  };
  std::map<std::string, Setter> radio{
      {"e_elec_j_per_bit", num(c.radio.e_elec_j_per_bit, "radio.e_elec_j_per_bit")},
      {"eps_amp_j_per_bit_m2", num(c.radio.eps_amp_j_per_bit_m2, "radio.eps_amp_j_per_bit_m2")},
      {"e_idle_j_per_s", num(c.radio.e_idle_j_per_s, "radio.e_idle_j_per_s")},
      {"bitrate_bps", num(c.radio.bitrate_bps, "radio.bitrate_bps")},
  };
  auto& pp = c.protocol_params;
  std::map<std::string, Setter> protocol_params{
      {"ch_probability_p", num(pp.ch_probability_p, "protocol_params.ch_probability_p")},
      {"round_duration_s", num(pp.round_duration_s, "protocol_params.round_duration_s")},
      {"membership_threshold_gamma",
       num(pp.membership_threshold_gamma, "protocol_params.membership_threshold_gamma")},
      {"fz_energy_threshold_j",
       opt_num(pp.fz_energy_threshold_j, "protocol_params.fz_energy_threshold_j")},
      {"ch_critical_energy_j",
       opt_num(pp.ch_critical_energy_j, "protocol_params.ch_critical_energy_j")},
      {"departure_threshold", num(pp.departure_threshold, "protocol_params.departure_threshold")},
  };
  std::map<std::string, Setter> ema{
      {"alpha", num(c.ema.alpha, "ema.alpha")},
      {"timeout_s", num(c.ema.timeout_s, "ema.timeout_s")},
  };

  std::map<std::string, Setter> top{
      {"area_width_m", num(c.area_width_m, "area_width_m")},
      {"area_height_m", num(c.area_height_m, "area_height_m")},
      {"node_count",
       [&](const json& v) { c.node_count = get_as<std::uint32_t>(v, "node_count"); }},
      {"comm_range_m", num(c.comm_range_m, "comm_range_m")},
      {"sim_duration_s", num(c.sim_duration_s, "sim_duration_s")},
      {"tick_s", num(c.tick_s, "tick_s")},
      {"cbr_interval_s", num(c.cbr_interval_s, "cbr_interval_s")},
      {"packet_size_bits",
       [&](const json& v) { c.packet_size_bits = get_as<std::uint32_t>(v, "packet_size_bits"); }},
      {"initial_energy_j", num(c.initial_energy_j, "initial_energy_j")},
      {"rng_seed", [&](const json& v) { c.rng_seed = get_as<std::uint64_t>(v, "rng_seed"); }},
      {"sink_position",
       [&](const json& v) {
         if (v.is_null())
           c.sink_position.reset();
         else
           c.sink_position = get_vec(v, "sink_position");
       }},
      {"initial_positions",
       [&](const json& v) {
         if (!v.is_array()) throw ConfigError("initial_positions", "expected an array");
         c.initial_positions.clear();
         for (const json& p : v) c.initial_positions.push_back(get_vec(p, "initial_positions"));
       }},
      {"record_trace",
       [&](const json& v) { c.record_trace = get_as<bool>(v, "record_trace"); }},
      {"protocol",
       [&](const json& v) {
         if (!v.is_string()) throw ConfigError("protocol", "expected a string");
         c.protocol = protocol_from_string(v.get<std::string>());
       }},
      {"mobility", [&](const json& v) { apply(v, "mobility", mobility, {}); }},
      {"radio", [&](const json& v) { apply(v, "radio", radio, {}); }},
      {"protocol_params", [&](const json& v) { apply(v, "protocol_params", protocol_params, {}); }},
      {"ema", [&](const json& v) { apply(v, "ema", ema, {}); }},
  };
  apply(j, "", top, ignored);
  return base;
}

}  // namespace wsn
