#pragma once

#include <set>
#include <string>

#include "json.hpp"

#include "wsn/config.hpp"

namespace wsn {

/// Full echo of every effective parameter.
nlohmann::json config_to_json(const SimConfig& c);

/// Overlay the keys of `j` onto `base`. Keys listed in `ignored` are skipped
/// (they belong to an enclosing schema); any other unknown key is a
/// ConfigError naming it. Type mismatches are ConfigErrors too.
SimConfig config_from_json(const nlohmann::json& j, SimConfig base = {},
                           const std::set<std::string>& ignored = {});

}  // namespace wsn
