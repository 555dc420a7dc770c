#include "doctest.h"

#include "wsn/config_io.hpp"

using namespace wsn;

namespace {

std::string field_of(const SimConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

std::string field_of(const nlohmann::json& j) {
  try {
    config_from_json(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("defaults are valid") {
  const SimConfig c;
  CHECK(field_of(c).empty());
  CHECK(c.node_count == 50);
  CHECK(c.area_width_m == 1500);
  CHECK(c.area_height_m == 300);
  const SimConfig r = c.resolved();
  CHECK(r.protocol_params.fz_energy_threshold_j == doctest::Approx(0.05));
  CHECK(r.protocol_params.ch_critical_energy_j == doctest::Approx(0.025));
}

TEST_CASE("validation names the offending field") {
  SimConfig c;
  c.node_count = 0;
  CHECK(field_of(c) == "node_count");
  c = {};
  c.protocol_params.ch_probability_p = 0;
  CHECK(field_of(c) == "protocol_params.ch_probability_p");
  c = {};
  c.mobility.v_max = 0.1;
  CHECK(field_of(c) == "mobility.v_max");
  c = {};
  c.sink_position = Vec2{2000, 0};
  CHECK(field_of(c) == "sink_position");
  c = {};
  c.initial_positions = {{1, 1}};
  CHECK(field_of(c) == "initial_positions");
  c = {};
  c.protocol_params.departure_threshold = 1.5;
  CHECK(field_of(c) == "protocol_params.departure_threshold");
}

TEST_CASE("json errors name the key") {
  CHECK(field_of(nlohmann::json{{"nodez", 10}}) == "nodez");
  CHECK(field_of(nlohmann::json{{"node_count", "many"}}) == "node_count");
  CHECK(field_of(nlohmann::json{{"protocol_params", {{"gama", 0.1}}}}) == "protocol_params.gama");
  CHECK(field_of(nlohmann::json{{"protocol", "SPIN"}}) == "protocol");
}

TEST_CASE("json roundtrip") {
  SimConfig c;
  c.node_count = 20;
  c.protocol = Protocol::FarZone;
  c.sink_position = Vec2{10, 20};
  c.initial_positions.assign(19, Vec2{5, 5});
  c.protocol_params.departure_threshold = 0.0;
  c.ema.alpha = 0.25;
  const nlohmann::json j = config_to_json(c);
  CHECK(config_to_json(config_from_json(j)) == j);
  CHECK(config_from_json(j).protocol == Protocol::FarZone);
}

TEST_CASE("protocol names") {
  for (Protocol p : {Protocol::Leach, Protocol::FarZone, Protocol::OptimizedFarZone})
    CHECK(protocol_from_string(to_string(p)) == p);
  CHECK(protocol_from_string("OFZ-LEACH") == Protocol::OptimizedFarZone);
  CHECK_THROWS_AS(protocol_from_string("x"), ConfigError);
}
