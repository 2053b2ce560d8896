#include "fdesim/simulation.hpp"

#include <utility>

namespace fdesim {

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::FdeLlm: return "fde-llm";
    case ModelKind::PureCA: return "pure-ca";
    case ModelKind::HK: return "hk";
    case ModelKind::OracleOnly: return "oracle-only";
  }
  return "fde-llm";
}

ModelKind model_for(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::PureCA: return ModelKind::PureCA;
    case BaselineKind::HK: return ModelKind::HK;
    case BaselineKind::OracleOnly: return ModelKind::OracleOnly;
  }
  return ModelKind::PureCA;
}

ModelKind model_for(const ScenarioConfig& cfg) {
  return cfg.baseline ? model_for(*cfg.baseline) : ModelKind::FdeLlm;
}

bool needs_oracle(ModelKind kind) { return kind == ModelKind::FdeLlm || kind == ModelKind::OracleOnly; }

SimState initial_state(const ScenarioConfig& cfg) {
  auto pop = init_population(cfg.params, cfg.timeline.initial_stance());
  SimState state;
  state.followers = make_follower_grid(std::move(pop.followers), pop.leaders);
  state.leaders = make_leader_population(std::move(pop.leaders), cfg.personas);
  return state;
}

namespace {

OpinionGrid clipped(const Grid<double>& values, const OpinionGrid& like) {
  OpinionGrid out = like;
  for (int i = 0; i < out.size(); ++i) {
    if (out.active(i)) out[i] = clip(values[i]);
  }
  return out;
}

FollowerGrid copy_coupled_leaders(const FollowerGrid& fgrid, const OpinionGrid& leaders) {
  FollowerGrid next = fgrid;
  for (int i = 0; i < next.opinions.size(); ++i) {
    if (!next.opinions.active(i)) continue;
    const auto& coupled = fgrid.leader_coupling[static_cast<std::size_t>(i)];
    if (coupled.empty()) continue;
    double sum = 0.0;
    for (int j : coupled) sum += leaders[j].value();
    next.opinions[i] = clip(sum / static_cast<double>(coupled.size()));
  }
  return next;
}

void hk_round(SimState& next, double epsilon) {
  std::vector<OpinionValue> pooled;
  auto& lead = next.leaders.opinions;
  auto& foll = next.followers.opinions;
  for (int i = 0; i < lead.size(); ++i) {
    if (lead.active(i)) pooled.push_back(lead[i]);
  }
  for (int i = 0; i < foll.size(); ++i) {
    if (foll.active(i)) pooled.push_back(foll[i]);
  }
  const auto updated = hk_step(pooled, epsilon);
  std::size_t k = 0;
  for (int i = 0; i < lead.size(); ++i) {
    if (lead.active(i)) lead[i] = updated[k++];
  }
  for (int i = 0; i < foll.size(); ++i) {
    if (foll.active(i)) foll[i] = updated[k++];
  }
}

SimulationParams without_decay(const SimulationParams& p) {
  RawParams raw = p.raw();
  raw.lambda = 0.0;
  raw.gamma = 0.0;
  return validate_params(raw);
}

}  // namespace

void advance(const ScenarioConfig& cfg, ModelKind kind, AttitudeOracle* oracle, SimState& state,
             const SimulationHooks& hooks) {
  if (needs_oracle(kind) && oracle == nullptr) throw ConfigError(to_string(kind) + " needs an attitude oracle");
  const auto& p = cfg.params;
  const KeyedRng rng(p.seed());
  const LeaderStepOptions options{cfg.neighborhood, cfg.context_window};
  const SimulationParams oracle_only_params = [&] {
    RawParams raw = p.raw();
    raw.alpha = 0.0;
    return validate_params(raw);
  }();
  const SimulationParams pure_ca_params = without_decay(p);

  for (int round = state.next_round; round < p.rounds(); ++round) {
    SimState next;
    std::vector<ActionRecord> actions;
    switch (kind) {
      case ModelKind::FdeLlm: {
        auto res = step_leaders(state.leaders, *oracle, cfg.timeline, p, round, options);
        next.leaders = std::move(res.next);
        actions = std::move(res.actions);
        next.followers = step_followers(state.followers, next.leaders.opinions, p, cfg.neighborhood, rng, round);
        break;
      }
      case ModelKind::OracleOnly: {
        auto res = step_leaders(state.leaders, *oracle, cfg.timeline, oracle_only_params, round, options);
        next.leaders = std::move(res.next);
        actions = std::move(res.actions);
        next.followers = copy_coupled_leaders(state.followers, next.leaders.opinions);
        break;
      }
      case ModelKind::PureCA: {
        next.leaders = state.leaders;
        next.leaders.opinions =
            clipped(step_leader_grid(state.leaders.opinions, pure_ca_params, cfg.neighborhood),
                    state.leaders.opinions);
        next.followers = step_followers(state.followers, next.leaders.opinions, pure_ca_params,
                                        cfg.neighborhood, rng, round);
        break;
      }
      case ModelKind::HK: {
        next.leaders = state.leaders;
        next.followers = state.followers;
        hk_round(next, p.epsilon());
        break;
      }
    }
    next.trajectory = std::move(state.trajectory);
    next.trajectory.push_back(mean_attitude(next.followers));
    next.next_round = round + 1;
    state = std::move(next);

    if (hooks.on_actions) hooks.on_actions(round, actions);
    if (hooks.on_round) hooks.on_round(state);
  }
}

OracleHandle make_oracle(const ScenarioConfig& cfg) {
  OracleHandle h;
  if (const auto* scripted = std::get_if<ScriptedOracleSpec>(&cfg.oracle)) {
    h.oracle = std::make_unique<ScriptedOracle>(scripted->schedule);
  } else {
    const auto& pc = std::get<ProviderConfig>(cfg.oracle);
    h.client = std::make_unique<LlmClient>(pc, resolve_token(pc));
    h.oracle = std::make_unique<LlmOracle>(*h.client, cfg.context_window);
  }
  return h;
}

ModelRun run_model(const ScenarioConfig& cfg, ModelKind kind, AttitudeOracle* oracle) {
  SimState state = initial_state(cfg);
  advance(cfg, kind, oracle, state);
  return {std::move(state.trajectory), oracle ? oracle->digest() : std::string("none")};
}

ModelRun run_model(const ScenarioConfig& cfg, ModelKind kind) {
  if (!needs_oracle(kind)) return run_model(cfg, kind, nullptr);
  auto handle = make_oracle(cfg);
  return run_model(cfg, kind, handle.oracle.get());
}

ScenarioConfig with_params(const ScenarioConfig& cfg, const RawParams& raw) {
  ScenarioConfig out = cfg;
  out.params = validate_params(raw);
  validate_scenario(out);
  return out;
}

}  // namespace fdesim
