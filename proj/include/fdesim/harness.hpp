#pragma once

// End-to-end runs: simulation, metrics and the files a run leaves behind.

#include <filesystem>
#include <optional>
#include <string>

#include "fdesim/metrics.hpp"
#include "fdesim/scenario.hpp"
#include "fdesim/series_io.hpp"
#include "fdesim/simulation.hpp"

namespace fdesim {

inline constexpr int kManifestVersion = 1;
inline constexpr int kCheckpointVersion = 1;

/// Version string recorded in manifests.
std::string code_version();

struct RunReport {
  ModelKind model = ModelKind::FdeLlm;
  Trajectory trajectory;
  AttitudeSeries daily;
  std::optional<MetricPair> metrics;  // only with a reference and a non-empty run
  std::filesystem::path output_dir;
  std::string oracle_digest;
  bool resumed = false;
};

/// Runs the scenario's model (its baseline, or the full model) and writes into
/// output_dir:
///   trajectory.csv   per-round follower mean
///   daily.csv        the same averaged per day
///   metrics.json     DTW and correlation against the reference, if any
///   actions.jsonl    one line per leader action, with prompts and answers
///   manifest.json    normalized scenario, model, code version, oracle digest
/// If the oracle's transport fails, checkpoint.json is written and the error
/// rethrown; the next run of the same scenario resumes from it.
RunReport run_scenario(const ScenarioConfig& cfg);
RunReport run_scenario(const ScenarioConfig& cfg, ModelKind kind);
/// Same, with a caller-owned oracle (ignored by models that take none).
RunReport run_scenario(const ScenarioConfig& cfg, ModelKind kind, AttitudeOracle* oracle);

/// Checkpoint round trip, exposed for tests.
nlohmann::json state_to_json(const SimState& state);
SimState state_from_json(const nlohmann::json& doc, const ScenarioConfig& cfg);

}  // namespace fdesim
