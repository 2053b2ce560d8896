#pragma once

// Experiment definition and its JSON file format (schema_version 1).

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fdesim/baselines.hpp"
#include "fdesim/ca_engine.hpp"
#include "fdesim/core.hpp"
#include "fdesim/leader_dynamics.hpp"
#include "fdesim/llm_client.hpp"
#include "fdesim/metrics.hpp"

namespace fdesim {

inline constexpr int kScenarioSchemaVersion = 1;

struct ScriptedOracleSpec {
  std::vector<ScheduleSegment> schedule;
};

using OracleSpec = std::variant<ScriptedOracleSpec, ProviderConfig>;

struct ScenarioConfig {
  SimulationParams params;
  Neighborhood neighborhood;
  NewsTimeline timeline;
  OracleSpec oracle = ScriptedOracleSpec{{ScheduleSegment{0, std::nullopt, DiscreteAttitude::Neutral}}};
  std::optional<BaselineKind> baseline;
  std::optional<AttitudeSeries> reference;
  std::filesystem::path output_dir = "out";
  int rounds_per_day = 24;
  int context_window = 5;
  std::vector<std::string> personas;
};

/// Schedule coverage for scripted oracles, event text for live ones,
/// reference range, window sizes. Throws ConfigError.
void validate_scenario(const ScenarioConfig& cfg);

/// Relative paths (reference, output dir, cache dir) resolve against
/// `base_dir`. Throws ConfigError naming the offending key.
ScenarioConfig scenario_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);

/// Reads a scenario file; paths resolve against the file's directory. A run
/// manifest is also accepted, in which case its embedded scenario is used.
ScenarioConfig load_scenario(const std::filesystem::path& file);

/// Normalized document: explicit rounds, inline reference, no output_dir.
/// Enough to replay a run bit-for-bit.
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

RawParams params_from_json(const nlohmann::json& params);
nlohmann::json params_to_json(const SimulationParams& p);

}  // namespace fdesim
