#include "fdesim/harness.hpp"

#include <fstream>
#include <sstream>

#ifndef FDESIM_VERSION
#define FDESIM_VERSION "unknown"
#endif

namespace fdesim {

using json = nlohmann::json;
namespace fs = std::filesystem;

std::string code_version() { return FDESIM_VERSION; }

namespace {

constexpr const char* kTrajectoryFile = "trajectory.csv";
constexpr const char* kDailyFile = "daily.csv";
constexpr const char* kMetricsFile = "metrics.json";
constexpr const char* kActionsFile = "actions.jsonl";
constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kCheckpointFile = "checkpoint.json";

void write_text(const fs::path& path, const std::string& text) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    out.flush();
    if (!out) throw Error("failed writing " + path.string());
  }
  fs::rename(tmp, path);
}

std::optional<json> read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    return json::parse(in);
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
}

json action_to_json(const LeaderAction& a) {
  return {{"author", a.author}, {"round", a.round}, {"kind", to_string(a.kind)}, {"text", a.text}};
}

LeaderAction action_from_json(const json& j) {
  const auto kind = parse_action_kind(j.at("kind").get<std::string>());
  if (!kind) throw DataError("checkpoint holds an unknown action kind");
  return {j.at("author").get<int>(), j.at("round").get<int>(), *kind, j.at("text").get<std::string>()};
}

json record_to_json(int round, const ActionRecord& rec) {
  json j = {{"round", round},
            {"agent", rec.action.author},
            {"kind", to_string(rec.action.kind)},
            {"text", rec.action.text},
            {"attitude", to_int(rec.scored)},
            {"opinion", rec.opinion.value()},
            {"news", rec.news ? json(*rec.news) : json(nullptr)}};
  if (!rec.action_prompt.empty() || !rec.action_response.empty()) {
    j["action_prompt"] = rec.action_prompt;
    j["action_response"] = rec.action_response;
  }
  if (!rec.attitude_prompt.empty() || !rec.attitude_response.empty()) {
    j["attitude_prompt"] = rec.attitude_prompt;
    j["attitude_response"] = rec.attitude_response;
  }
  return j;
}

json grid_values(const OpinionGrid& g) {
  json arr = json::array();
  for (int i = 0; i < g.size(); ++i) arr.push_back(g[i].value());
  return arr;
}

void load_grid_values(OpinionGrid& g, const json& arr) {
  if (!arr.is_array() || static_cast<int>(arr.size()) != g.size())
    throw DataError("checkpoint grid size does not match the scenario");
  for (int i = 0; i < g.size(); ++i) g[i] = OpinionValue(arr[static_cast<std::size_t>(i)].get<double>());
}

// Keeps only the log lines of rounds that the checkpoint already covers.
void truncate_action_log(const fs::path& path, int next_round) {
  std::ifstream in(path);
  if (!in) return;
  std::ostringstream kept;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("round")) continue;
    if (j.at("round").get<int>() < next_round) kept << line << '\n';
  }
  in.close();
  write_text(path, kept.str());
}

json metrics_to_json(const MetricPair& m, std::size_t simulated_days, std::size_t reference_days) {
  return {{"dtw", m.dtw},
          {"pearson", m.pearson ? json(*m.pearson) : json(nullptr)},
          {"pearson_error", m.pearson ? json(nullptr) : json(m.pearson_error)},
          {"simulated_days", simulated_days},
          {"reference_days", reference_days}};
}

}  // namespace

json state_to_json(const SimState& state) {
  json attitudes = json::array();
  for (const auto& p : state.leaders.profiles) attitudes.push_back(to_int(p.current_attitude));
  json recent = json::array();
  for (const auto& a : state.leaders.recent) recent.push_back(action_to_json(a));
  return {{"next_round", state.next_round},
          {"trajectory", state.trajectory.values()},
          {"leader_opinions", grid_values(state.leaders.opinions)},
          {"leader_attitudes", std::move(attitudes)},
          {"recent_actions", std::move(recent)},
          {"follower_opinions", grid_values(state.followers.opinions)}};
}

SimState state_from_json(const json& doc, const ScenarioConfig& cfg) {
  SimState state = initial_state(cfg);
  try {
    state.next_round = doc.at("next_round").get<int>();
    for (double v : doc.at("trajectory")) state.trajectory.push_back(OpinionValue(v));
    if (static_cast<int>(state.trajectory.size()) != state.next_round)
      throw DataError("checkpoint trajectory length does not match its round");
    load_grid_values(state.leaders.opinions, doc.at("leader_opinions"));
    load_grid_values(state.followers.opinions, doc.at("follower_opinions"));
    const auto& attitudes = doc.at("leader_attitudes");
    if (attitudes.size() != state.leaders.profiles.size())
      throw DataError("checkpoint leader count does not match the scenario");
    for (std::size_t i = 0; i < attitudes.size(); ++i)
      state.leaders.profiles[i].current_attitude = attitude_from_int(attitudes[i].get<int>());
    state.leaders.recent.clear();
    for (const auto& a : doc.at("recent_actions")) state.leaders.recent.push_back(action_from_json(a));
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed checkpoint: ") + e.what());
  }
  return state;
}

RunReport run_scenario(const ScenarioConfig& cfg) { return run_scenario(cfg, model_for(cfg)); }

RunReport run_scenario(const ScenarioConfig& cfg, ModelKind kind) {
  OracleHandle handle;
  if (needs_oracle(kind)) handle = make_oracle(cfg);
  return run_scenario(cfg, kind, handle.oracle.get());
}

RunReport run_scenario(const ScenarioConfig& cfg, ModelKind kind, AttitudeOracle* oracle) {
  validate_scenario(cfg);
  const fs::path dir = cfg.output_dir;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  const json scenario_doc = scenario_to_json(cfg);
  const fs::path checkpoint_path = dir / kCheckpointFile;
  const fs::path actions_path = dir / kActionsFile;

  RunReport report;
  report.model = kind;
  report.output_dir = dir;

  SimState state = initial_state(cfg);
  if (auto ck = read_json(checkpoint_path)) {
    if (ck->value("checkpoint_version", 0) == kCheckpointVersion && ck->value("model", "") == to_string(kind) &&
        ck->contains("scenario") && ck->at("scenario") == scenario_doc && ck->contains("state")) {
      state = state_from_json(ck->at("state"), cfg);
      report.resumed = true;
    }
  }
  if (report.resumed) {
    truncate_action_log(actions_path, state.next_round);
  } else {
    write_text(actions_path, "");
  }

  std::ofstream actions_log(actions_path, std::ios::binary | std::ios::app);
  if (!actions_log) throw Error("cannot write " + actions_path.string());
  SimulationHooks hooks;
  hooks.on_actions = [&](int round, std::span<const ActionRecord> records) {
    for (const auto& rec : records) actions_log << record_to_json(round, rec).dump() << '\n';
    actions_log.flush();
  };

  try {
    advance(cfg, kind, oracle, state, hooks);
  } catch (const OracleTransportError&) {
    actions_log.close();
    const json ck = {{"checkpoint_version", kCheckpointVersion},
                     {"model", to_string(kind)},
                     {"scenario", scenario_doc},
                     {"state", state_to_json(state)}};
    write_text(checkpoint_path, ck.dump(2) + "\n");
    throw;
  }
  actions_log.close();

  report.trajectory = std::move(state.trajectory);
  report.oracle_digest = oracle && needs_oracle(kind) ? oracle->digest() : std::string("none");

  json outputs = json::array({kTrajectoryFile, kDailyFile, kActionsFile});
  write_trajectory(report.trajectory, dir / kTrajectoryFile);
  report.daily = downsample(report.trajectory, cfg.rounds_per_day);
  write_series(report.daily, dir / kDailyFile);

  if (cfg.reference && !report.daily.values.empty()) {
    report.metrics = evaluate(report.daily, *cfg.reference);
    write_text(dir / kMetricsFile,
               metrics_to_json(*report.metrics, report.daily.values.size(), cfg.reference->values.size()).dump(2) +
                   "\n");
    outputs.push_back(kMetricsFile);
  } else {
    fs::remove(dir / kMetricsFile, ec);
  }

  const json manifest = {{"manifest_version", kManifestVersion},
                         {"code_version", code_version()},
                         {"model", to_string(kind)},
                         {"oracle_digest", report.oracle_digest},
                         {"rounds_completed", static_cast<int>(report.trajectory.size())},
                         {"outputs", std::move(outputs)},
                         {"scenario", scenario_doc}};
  write_text(dir / kManifestFile, manifest.dump(2) + "\n");
  fs::remove(checkpoint_path, ec);
  return report;
}

}  // namespace fdesim
