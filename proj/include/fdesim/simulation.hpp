#pragma once

// Round loop shared by the full model and the baselines.

#include <functional>
#include <memory>
#include <span>
#include <string>

#include "fdesim/baselines.hpp"
#include "fdesim/follower_dynamics.hpp"
#include "fdesim/leader_dynamics.hpp"
#include "fdesim/llm_client.hpp"
#include "fdesim/scenario.hpp"

namespace fdesim {

enum class ModelKind { FdeLlm, PureCA, HK, OracleOnly };

std::string to_string(ModelKind kind);
ModelKind model_for(BaselineKind kind);
/// The scenario's baseline if it names one, otherwise the full model.
ModelKind model_for(const ScenarioConfig& cfg);
bool needs_oracle(ModelKind kind);

struct SimState {
  int next_round = 0;
  LeaderPopulation leaders;
  FollowerGrid followers;
  Trajectory trajectory;
};

/// Population at round 0, before any update.
SimState initial_state(const ScenarioConfig& cfg);

struct SimulationHooks {
  std::function<void(int round, std::span<const ActionRecord> actions)> on_actions;
  std::function<void(const SimState& state)> on_round;
};

/// Runs rounds state.next_round .. rounds-1. A round is committed to `state`
/// only once it has completed, so an exception leaves the last finished round
/// in place. Hooks fire after each commit. `oracle` may be null for models
/// that do not use one.
void advance(const ScenarioConfig& cfg, ModelKind kind, AttitudeOracle* oracle, SimState& state,
             const SimulationHooks& hooks = {});

/// Owns the oracle described by the scenario (and its client, when live).
struct OracleHandle {
  std::unique_ptr<LlmClient> client;
  std::unique_ptr<AttitudeOracle> oracle;
};

/// Live oracles read their token here. Throws ConfigError.
OracleHandle make_oracle(const ScenarioConfig& cfg);

struct ModelRun {
  Trajectory trajectory;
  std::string oracle_digest;
};

/// In-memory run without any file output.
ModelRun run_model(const ScenarioConfig& cfg, ModelKind kind);
ModelRun run_model(const ScenarioConfig& cfg, ModelKind kind, AttitudeOracle* oracle);

/// Copy of the scenario with one parameter replaced, revalidated.
ScenarioConfig with_params(const ScenarioConfig& cfg, const RawParams& raw);

}  // namespace fdesim
