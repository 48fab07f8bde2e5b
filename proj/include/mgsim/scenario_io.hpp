#pragma once

#include <string>

#include "mgsim/scenario.hpp"

namespace mgsim {

// Reads and fully validates a scenario file. All defaults are resolved; the
// returned config is exactly what a run will use. Unknown keys, schema
// violations and physics violations all throw with the offending location.
ScenarioConfig parse_scenario(const std::string& path);
ScenarioConfig parse_scenario_text(const std::string& text);

// Canonical serialization of a resolved config. Re-parsing the echo yields an
// identical ScenarioConfig.
std::string echo_toml(const ScenarioConfig& cfg);
void write_config_echo(const ScenarioConfig& cfg, const std::string& path);

}  // namespace mgsim
