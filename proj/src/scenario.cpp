#include "fdesim/scenario.hpp"

#include <fstream>
#include <set>

#include "fdesim/series_io.hpp"

namespace fdesim {

using json = nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, const std::string& where, std::initializer_list<const char*> allowed) {
  const std::set<std::string> known(allowed.begin(), allowed.end());
  for (const auto& [key, value] : obj.items()) {
    if (!known.count(key)) throw ConfigError("unknown key '" + where + key + "'");
  }
}

const json& require_object(const json& v, const std::string& name) {
  if (!v.is_object()) throw ConfigError(name + " must be an object");
  return v;
}

double number(const json& obj, const char* key, const std::string& where, double fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + key + " must be a number");
  return v.get<double>();
}

long long integer(const json& obj, const char* key, const std::string& where, long long fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + key + " must be an integer");
  return v.get<long long>();
}

std::string text(const json& obj, const char* key, const std::string& where, const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_string()) throw ConfigError(where + key + " must be a string");
  return v.get<std::string>();
}

bool boolean(const json& obj, const char* key, const std::string& where, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_boolean()) throw ConfigError(where + key + " must be true or false");
  return v.get<bool>();
}

GridShape shape(const json& obj, const char* key, const std::string& where, GridShape fallback) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    throw ConfigError(where + key + " must be [rows, cols]");
  return {v[0].get<int>(), v[1].get<int>()};
}

DiscreteAttitude attitude(const json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + key + " is required");
  const auto& v = obj.at(key);
  if (!v.is_number_integer()) throw ConfigError(where + key + " must be -1, 0 or 1");
  try {
    return attitude_from_int(v.get<long long>());
  } catch (const ConfigError&) {
    throw ConfigError(where + key + " must be -1, 0 or 1");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() ? path : base / path;
}

std::string neighborhood_kind_name(NeighborhoodKind k) {
  return k == NeighborhoodKind::Moore8 ? "moore8" : "von_neumann4";
}

std::string boundary_name(Boundary b) { return b == Boundary::Toroidal ? "toroidal" : "clamped"; }

}  // namespace

RawParams params_from_json(const json& params) {
  const std::string where = "params.";
  require_object(params, "params");
  reject_unknown_keys(params, where,
                      {"r", "w", "epsilon", "alpha", "lambda", "gamma", "beta", "leader_grid", "follower_grid",
                       "leader_agents", "follower_agents", "seed", "rounds", "init_noise", "follower_init",
                       "enforce_ratio"});
  RawParams raw;
  raw.r = number(params, "r", where, raw.r);
  raw.w = number(params, "w", where, raw.w);
  raw.epsilon = number(params, "epsilon", where, raw.epsilon);
  raw.alpha = number(params, "alpha", where, raw.alpha);
  raw.lambda = number(params, "lambda", where, raw.lambda);
  raw.gamma = number(params, "gamma", where, raw.gamma);
  raw.beta = number(params, "beta", where, raw.beta);
  raw.leader_grid = shape(params, "leader_grid", where, raw.leader_grid);
  raw.follower_grid =
      shape(params, "follower_grid", where, {raw.leader_grid.rows * 3, raw.leader_grid.cols * 3});
  if (params.contains("leader_agents")) raw.leader_agents = static_cast<int>(integer(params, "leader_agents", where, 0));
  if (params.contains("follower_agents"))
    raw.follower_agents = static_cast<int>(integer(params, "follower_agents", where, 0));
  if (params.contains("seed")) {
    const auto& s = params.at("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("params.seed must be a non-negative integer");
    raw.seed = s.get<std::uint64_t>();
  }
  raw.rounds = static_cast<int>(integer(params, "rounds", where, raw.rounds));
  raw.init_noise = number(params, "init_noise", where, raw.init_noise);
  raw.follower_init = number(params, "follower_init", where, raw.follower_init);
  raw.enforce_ratio = boolean(params, "enforce_ratio", where, raw.enforce_ratio);
  return raw;
}

json params_to_json(const SimulationParams& p) {
  return {{"r", p.r()},
          {"w", p.w()},
          {"epsilon", p.epsilon()},
          {"alpha", p.alpha()},
          {"lambda", p.lambda()},
          {"gamma", p.gamma()},
          {"beta", p.beta()},
          {"leader_grid", {p.leader_grid().rows, p.leader_grid().cols}},
          {"follower_grid", {p.follower_grid().rows, p.follower_grid().cols}},
          {"leader_agents", p.leader_agents()},
          {"follower_agents", p.follower_agents()},
          {"seed", p.seed()},
          {"rounds", p.rounds()},
          {"init_noise", p.init_noise()},
          {"follower_init", p.follower_init()},
          {"enforce_ratio", p.enforce_ratio()}};
}

void validate_scenario(const ScenarioConfig& cfg) {
  if (cfg.rounds_per_day <= 0) throw ConfigError("rounds_per_day must be positive");
  if (cfg.context_window < 0) throw ConfigError("leaders.context_window must be >= 0");
  const int rounds = cfg.params.rounds();
  if (const auto* scripted = std::get_if<ScriptedOracleSpec>(&cfg.oracle)) {
    const ScriptedOracle oracle(scripted->schedule);
    if (rounds > 0 && !oracle.covers(0, rounds - 1))
      throw ConfigError("scripted schedule must cover every round 0.." + std::to_string(rounds - 1));
  } else {
    validate(std::get<ProviderConfig>(cfg.oracle));
    for (const auto& e : cfg.timeline.events()) {
      if (e.text.empty()) throw ConfigError("live oracles need non-empty news text at every timeline event");
    }
  }
  if (cfg.reference) {
    if (cfg.reference->values.empty()) throw ConfigError("reference series is empty");
    for (double v : cfg.reference->values) {
      if (!(v >= -1.0 && v <= 1.0)) throw ConfigError("reference values must lie in [-1, 1]");
    }
  }
  for (const auto& persona : cfg.personas) {
    if (persona.empty()) throw ConfigError("leader personas must not be empty");
  }
}

ScenarioConfig scenario_from_json(const json& doc, const std::filesystem::path& base_dir) {
  require_object(doc, "scenario");
  reject_unknown_keys(doc, "",
                      {"schema_version", "params", "duration_days", "rounds_per_day", "neighborhood", "timeline",
                       "oracle", "leaders", "baseline", "reference_path", "reference", "output_dir"});
  const long long version = integer(doc, "schema_version", "", -1);
  if (version != kScenarioSchemaVersion)
    throw ConfigError("schema_version must be " + std::to_string(kScenarioSchemaVersion));

  ScenarioConfig cfg;
  cfg.rounds_per_day = static_cast<int>(integer(doc, "rounds_per_day", "", 24));
  if (cfg.rounds_per_day <= 0) throw ConfigError("rounds_per_day must be positive");

  if (doc.contains("reference_path") && doc.contains("reference"))
    throw ConfigError("give either reference_path or reference, not both");
  if (doc.contains("reference_path")) {
    cfg.reference = load_reference_series(resolve(base_dir, text(doc, "reference_path", "", "")));
  } else if (doc.contains("reference")) {
    const auto& values = doc.at("reference");
    if (!values.is_array()) throw ConfigError("reference must be an array of numbers");
    AttitudeSeries series{{}, "reference"};
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError("reference must be an array of numbers");
      series.values.push_back(v.get<double>());
    }
    cfg.reference = std::move(series);
  }

  if (!doc.contains("params")) throw ConfigError("params is required");
  RawParams raw = params_from_json(doc.at("params"));
  if (!doc.at("params").contains("rounds")) {
    if (doc.contains("duration_days")) {
      raw.rounds = static_cast<int>(integer(doc, "duration_days", "", 0)) * cfg.rounds_per_day;
    } else if (cfg.reference) {
      raw.rounds = static_cast<int>(cfg.reference->values.size()) * cfg.rounds_per_day;
    } else {
      throw ConfigError("params.rounds is required when neither duration_days nor a reference is given");
    }
  }
  cfg.params = validate_params(raw);

  if (doc.contains("neighborhood")) {
    const auto& nb = require_object(doc.at("neighborhood"), "neighborhood");
    reject_unknown_keys(nb, "neighborhood.", {"kind", "boundary"});
    const auto kind = text(nb, "kind", "neighborhood.", "moore8");
    const auto boundary = text(nb, "boundary", "neighborhood.", "toroidal");
    if (kind == "moore8") {
      cfg.neighborhood.kind = NeighborhoodKind::Moore8;
    } else if (kind == "von_neumann4") {
      cfg.neighborhood.kind = NeighborhoodKind::VonNeumann4;
    } else {
      throw ConfigError("neighborhood.kind must be moore8 or von_neumann4");
    }
    if (boundary == "toroidal") {
      cfg.neighborhood.boundary = Boundary::Toroidal;
    } else if (boundary == "clamped") {
      cfg.neighborhood.boundary = Boundary::Clamped;
    } else {
      throw ConfigError("neighborhood.boundary must be toroidal or clamped");
    }
  }

  if (!doc.contains("timeline") || !doc.at("timeline").is_array())
    throw ConfigError("timeline must be an array of news events");
  std::vector<NewsEvent> events;
  for (const auto& e : doc.at("timeline")) {
    const std::string where = "timeline[" + std::to_string(events.size()) + "].";
    require_object(e, where.substr(0, where.size() - 1));
    reject_unknown_keys(e, where, {"round", "day", "stance", "text"});
    NewsEvent ev;
    if (e.contains("round") == e.contains("day")) throw ConfigError(where + "needs exactly one of round or day");
    ev.round = e.contains("round") ? static_cast<int>(integer(e, "round", where, 0))
                                   : static_cast<int>(integer(e, "day", where, 0)) * cfg.rounds_per_day;
    ev.stance = attitude(e, "stance", where);
    ev.text = text(e, "text", where, "");
    events.push_back(std::move(ev));
  }
  cfg.timeline = NewsTimeline(std::move(events));

  if (!doc.contains("oracle")) throw ConfigError("oracle is required");
  const auto& oracle = require_object(doc.at("oracle"), "oracle");
  const auto type = text(oracle, "type", "oracle.", "");
  if (type == "scripted") {
    reject_unknown_keys(oracle, "oracle.", {"type", "schedule"});
    if (!oracle.contains("schedule") || !oracle.at("schedule").is_array())
      throw ConfigError("oracle.schedule must be an array");
    ScriptedOracleSpec spec;
    for (const auto& s : oracle.at("schedule")) {
      const std::string where = "oracle.schedule[" + std::to_string(spec.schedule.size()) + "].";
      require_object(s, where.substr(0, where.size() - 1));
      reject_unknown_keys(s, where, {"from", "to", "attitude"});
      ScheduleSegment seg;
      seg.first_round = static_cast<int>(integer(s, "from", where, 0));
      if (s.contains("to")) seg.last_round = static_cast<int>(integer(s, "to", where, 0));
      seg.attitude = attitude(s, "attitude", where);
      spec.schedule.push_back(seg);
    }
    cfg.oracle = std::move(spec);
  } else if (type == "live") {
    reject_unknown_keys(oracle, "oracle.",
                        {"type", "endpoint", "model", "token_env", "timeout_ms", "max_retries", "max_concurrency",
                         "temperature", "action_temperature", "backoff_ms", "cache_dir"});
    ProviderConfig pc;
    pc.endpoint = text(oracle, "endpoint", "oracle.", "");
    pc.model = text(oracle, "model", "oracle.", "");
    pc.token_env = text(oracle, "token_env", "oracle.", pc.token_env);
    pc.timeout = std::chrono::milliseconds(integer(oracle, "timeout_ms", "oracle.", pc.timeout.count()));
    pc.max_retries = static_cast<int>(integer(oracle, "max_retries", "oracle.", pc.max_retries));
    pc.max_concurrency = static_cast<int>(integer(oracle, "max_concurrency", "oracle.", pc.max_concurrency));
    pc.temperature = number(oracle, "temperature", "oracle.", pc.temperature);
    pc.action_temperature = number(oracle, "action_temperature", "oracle.", pc.action_temperature);
    pc.backoff = std::chrono::milliseconds(integer(oracle, "backoff_ms", "oracle.", pc.backoff.count()));
    pc.cache_dir = resolve(base_dir, text(oracle, "cache_dir", "oracle.", pc.cache_dir.string()));
    cfg.oracle = std::move(pc);
  } else {
    throw ConfigError("oracle.type must be scripted or live");
  }

  if (doc.contains("leaders")) {
    const auto& leaders = require_object(doc.at("leaders"), "leaders");
    reject_unknown_keys(leaders, "leaders.", {"personas", "context_window"});
    cfg.context_window = static_cast<int>(integer(leaders, "context_window", "leaders.", cfg.context_window));
    if (leaders.contains("personas")) {
      const auto& personas = leaders.at("personas");
      if (!personas.is_array()) throw ConfigError("leaders.personas must be an array of strings");
      for (const auto& p : personas) {
        if (!p.is_string()) throw ConfigError("leaders.personas must be an array of strings");
        cfg.personas.push_back(p.get<std::string>());
      }
    }
  }

  if (doc.contains("baseline")) cfg.baseline = parse_baseline_kind(text(doc, "baseline", "", ""));
  cfg.output_dir = resolve(base_dir, text(doc, "output_dir", "", "out"));

  validate_scenario(cfg);
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open scenario file " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("scenario file " + file.string() + " is not valid JSON: " + e.what());
  }
  if (doc.is_object() && doc.contains("manifest_version")) doc = doc.at("scenario");
  return scenario_from_json(doc, file.parent_path());
}

json scenario_to_json(const ScenarioConfig& cfg) {
  json doc;
  doc["schema_version"] = kScenarioSchemaVersion;
  doc["params"] = params_to_json(cfg.params);
  doc["rounds_per_day"] = cfg.rounds_per_day;
  doc["neighborhood"] = {{"kind", neighborhood_kind_name(cfg.neighborhood.kind)},
                         {"boundary", boundary_name(cfg.neighborhood.boundary)}};

  json timeline = json::array();
  for (const auto& e : cfg.timeline.events())
    timeline.push_back({{"round", e.round}, {"stance", to_int(e.stance)}, {"text", e.text}});
  doc["timeline"] = std::move(timeline);

  if (const auto* scripted = std::get_if<ScriptedOracleSpec>(&cfg.oracle)) {
    json schedule = json::array();
    for (const auto& s : scripted->schedule) {
      json seg = {{"from", s.first_round}, {"attitude", to_int(s.attitude)}};
      if (s.last_round) seg["to"] = *s.last_round;
      schedule.push_back(std::move(seg));
    }
    doc["oracle"] = {{"type", "scripted"}, {"schedule", std::move(schedule)}};
  } else {
    const auto& pc = std::get<ProviderConfig>(cfg.oracle);
    doc["oracle"] = {{"type", "live"},
                     {"endpoint", pc.endpoint},
                     {"model", pc.model},
                     {"token_env", pc.token_env},
                     {"timeout_ms", pc.timeout.count()},
                     {"max_retries", pc.max_retries},
                     {"max_concurrency", pc.max_concurrency},
                     {"temperature", pc.temperature},
                     {"action_temperature", pc.action_temperature},
                     {"backoff_ms", pc.backoff.count()},
                     {"cache_dir", pc.cache_dir.string()}};
  }

  json leaders = {{"context_window", cfg.context_window}};
  if (!cfg.personas.empty()) leaders["personas"] = cfg.personas;
  doc["leaders"] = std::move(leaders);
  if (cfg.baseline) doc["baseline"] = to_string(*cfg.baseline);
  if (cfg.reference) doc["reference"] = cfg.reference->values;
  return doc;
}

}  // namespace fdesim
