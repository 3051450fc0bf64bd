#pragma once
// One JSON config file drives both planning and simulation. Parsing is
// strict: unknown fields and type mismatches are rejected with a field-path
// locus. Absent fields fall back to the documented defaults.

#include <optional>
#include <string>

#include <json.hpp>

#include "lakecomp/scheduler.hpp"
#include "lakecomp/simulator.hpp"
#include "lakecomp/types.hpp"

namespace lakecomp {

struct CliConfig {
    EngineConfig engine;
    TriggerMode trigger;
    std::optional<SimConfig> simulator;
};

// Throws ParseError on malformed input, ConfigError on invariant violations.
CliConfig load_cli_config_file(const std::string& path);
CliConfig parse_cli_config(const std::string& text);

// Section parsers, exposed for embedding configs in other documents.
EngineConfig engine_config_from_json(const nlohmann::json& j, const std::string& path);
TriggerMode trigger_mode_from_json(const nlohmann::json& j, const std::string& path);
SimConfig sim_config_from_json(const nlohmann::json& j, const std::string& path);

}  // namespace lakecomp
