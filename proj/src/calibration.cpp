#include "fdesim/calibration.hpp"

#include <algorithm>
#include <fstream>
#include <thread>

#include "fdesim/series_io.hpp"
#include "fdesim/simulation.hpp"
#include "parallel.hpp"

namespace fdesim {

std::string to_string(Objective objective) {
  return objective == Objective::MaxCorr ? "max-corr" : "min-dtw";
}

Objective parse_objective(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "max-corr") return Objective::MaxCorr;
  if (n == "min-dtw") return Objective::MinDtw;
  throw ConfigError("unknown objective '" + std::string(name) + "' (expected max-corr or min-dtw)");
}

namespace {

double RawParams::*field_for(std::string_view name) {
  if (name == "r") return &RawParams::r;
  if (name == "w") return &RawParams::w;
  if (name == "epsilon") return &RawParams::epsilon;
  if (name == "alpha") return &RawParams::alpha;
  if (name == "lambda") return &RawParams::lambda;
  if (name == "gamma") return &RawParams::gamma;
  if (name == "beta") return &RawParams::beta;
  if (name == "init_noise") return &RawParams::init_noise;
  if (name == "follower_init") return &RawParams::follower_init;
  return nullptr;
}

std::string csv_number(const std::optional<double>& v) {
  if (!v) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", *v);
  return buf;
}

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c == '\n' ? ' ' : c;
  }
  return out + "\"";
}

}  // namespace

bool is_searchable_param(std::string_view name) { return field_for(name) != nullptr; }

void set_param(RawParams& raw, std::string_view name, double value) {
  const auto field = field_for(name);
  if (!field) throw ConfigError("parameter '" + std::string(name) + "' cannot be searched");
  raw.*field = value;
}

CalibrationResult grid_search(std::vector<SearchDimension> space, const ScenarioConfig& scenario,
                              const AttitudeSeries& reference, Objective objective, int workers) {
  if (space.empty()) throw ConfigError("search space is empty");
  if (!std::holds_alternative<ScriptedOracleSpec>(scenario.oracle))
    throw ConfigError("calibration requires a scripted oracle");
  std::sort(space.begin(), space.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  std::size_t points = 1;
  for (std::size_t d = 0; d < space.size(); ++d) {
    auto& dim = space[d];
    if (!is_searchable_param(dim.name)) throw ConfigError("parameter '" + dim.name + "' cannot be searched");
    if (d > 0 && space[d - 1].name == dim.name) throw ConfigError("parameter '" + dim.name + "' listed twice");
    if (dim.values.empty()) throw ConfigError("no values given for '" + dim.name + "'");
    std::sort(dim.values.begin(), dim.values.end());
    dim.values.erase(std::unique(dim.values.begin(), dim.values.end()), dim.values.end());
    points *= dim.values.size();
  }

  CalibrationResult result;
  result.objective = objective;
  for (const auto& dim : space) result.names.push_back(dim.name);
  result.table.resize(points);
  for (std::size_t k = 0; k < points; ++k) {
    // Odometer decode: the last dimension varies fastest.
    std::size_t rest = k;
    auto& point = result.table[k].point;
    point.resize(space.size());
    for (std::size_t d = space.size(); d-- > 0;) {
      point[d] = space[d].values[rest % space[d].values.size()];
      rest /= space[d].values.size();
    }
  }

  const ModelKind kind = model_for(scenario);
  if (workers <= 0) workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  detail::parallel_for(static_cast<int>(points), workers, [&](int k) {
    auto& row = result.table[static_cast<std::size_t>(k)];
    try {
      RawParams raw = scenario.params.raw();
      for (std::size_t d = 0; d < space.size(); ++d) set_param(raw, space[d].name, row.point[d]);
      const auto cfg = with_params(scenario, raw);
      const auto run = run_model(cfg, kind);
      const auto daily = downsample(run.trajectory, cfg.rounds_per_day);
      const auto m = evaluate(daily, reference);
      row.dtw = m.dtw;
      row.pearson = m.pearson;
      if (objective == Objective::MinDtw) {
        row.score = m.dtw;
      } else if (m.pearson) {
        row.score = m.pearson;
      } else {
        row.error = m.pearson_error;
      }
    } catch (const Error& e) {
      row.error = e.what();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t k = 0; k < points; ++k) {
    const auto& s = result.table[k].score;
    if (!s) continue;
    if (!best) {
      best = k;
      continue;
    }
    const double b = *result.table[*best].score;
    if (objective == Objective::MaxCorr ? *s > b : *s < b) best = k;
  }
  if (!best) throw MetricError("no grid point produced a score");
  result.best_index = *best;
  result.best_score = *result.table[*best].score;
  RawParams raw = scenario.params.raw();
  for (std::size_t d = 0; d < space.size(); ++d) set_param(raw, space[d].name, result.table[*best].point[d]);
  result.best_params = validate_params(raw);
  return result;
}

void write_score_table(const CalibrationResult& result, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& n : result.names) out << n << ',';
  out << "dtw,pearson,score,error\n";
  for (const auto& row : result.table) {
    for (double v : row.point) out << csv_number(v) << ',';
    out << csv_number(row.dtw) << ',' << csv_number(row.pearson) << ',' << csv_number(row.score) << ','
        << csv_text(row.error) << '\n';
  }
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace fdesim
