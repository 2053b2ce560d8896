#pragma once

// Exhaustive grid search of model parameters against a reference series.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdesim/metrics.hpp"
#include "fdesim/scenario.hpp"

namespace fdesim {

enum class Objective { MaxCorr, MinDtw };

std::string to_string(Objective objective);
/// "max-corr" or "min-dtw" (underscores accepted). Throws ConfigError.
Objective parse_objective(std::string_view name);

/// Parameters a search may vary: r, w, epsilon, alpha, lambda, gamma, beta,
/// init_noise, follower_init.
bool is_searchable_param(std::string_view name);
/// Throws ConfigError for names outside is_searchable_param.
void set_param(RawParams& raw, std::string_view name, double value);

struct SearchDimension {
  std::string name;
  std::vector<double> values;
};

struct ScoreRow {
  std::vector<double> point;  // one value per CalibrationResult::names
  std::optional<double> dtw;
  std::optional<double> pearson;
  std::optional<double> score;
  std::string error;  // why the score is missing
};

struct CalibrationResult {
  std::vector<std::string> names;  // sorted
  std::vector<ScoreRow> table;     // lexicographic order of the points
  std::size_t best_index = 0;
  SimulationParams best_params;
  double best_score = 0.0;
  Objective objective = Objective::MaxCorr;
};

/// Evaluates every point of the Cartesian product. Dimensions are ordered by
/// name and their values ascending (duplicates dropped); the table lists
/// points in that lexicographic order and ties go to the earliest point.
/// Failed runs and undefined scores are kept in the table as missing. The
/// scenario must use a scripted oracle. Throws ConfigError for an invalid
/// space and MetricError if no point produced a score.
CalibrationResult grid_search(std::vector<SearchDimension> space, const ScenarioConfig& scenario,
                              const AttitudeSeries& reference, Objective objective, int workers = 0);

/// Header row of parameter names then dtw, pearson, score, error.
void write_score_table(const CalibrationResult& result, const std::filesystem::path& path);

}  // namespace fdesim
