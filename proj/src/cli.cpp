#include "fdesim/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <string>

#include "fdesim/calibration.hpp"
#include "fdesim/harness.hpp"

namespace fdesim {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fixed6(double v) { return format_fixed6(v); }

void print_metrics(std::ostream& out, const MetricPair& m) {
  out << "DTW " << fixed6(m.dtw) << '\n';
  if (m.pearson) {
    out << "Corr " << fixed6(*m.pearson) << '\n';
  } else {
    out << "Corr undefined (" << m.pearson_error << ")\n";
  }
}

void print_report(std::ostream& out, const RunReport& report) {
  out << "model " << to_string(report.model) << '\n';
  out << "rounds " << report.trajectory.size() << '\n';
  if (report.resumed) out << "resumed from checkpoint\n";
  if (report.metrics) print_metrics(out, *report.metrics);
  out << "output " << report.output_dir.string() << '\n';
}

ScenarioConfig load_with_output(const std::string& path, const std::string& out_dir) {
  auto cfg = load_scenario(path);
  if (!out_dir.empty()) cfg.output_dir = out_dir;
  return cfg;
}

struct CalibrationSpec {
  ScenarioConfig scenario;
  AttitudeSeries reference;
  Objective objective = Objective::MaxCorr;
  std::vector<SearchDimension> space;
  int workers = 0;
};

CalibrationSpec load_calibration_spec(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("cannot open calibration spec " + file.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("calibration spec is not valid JSON: " + std::string(e.what()));
  }
  if (!doc.is_object()) throw ConfigError("calibration spec must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key != "scenario" && key != "objective" && key != "space" && key != "reference_path" && key != "workers")
      throw ConfigError("unknown key '" + key + "' in calibration spec");
  }
  const fs::path base = file.parent_path();
  if (!doc.contains("scenario") || !doc["scenario"].is_string())
    throw ConfigError("calibration spec needs a scenario path");
  CalibrationSpec spec;
  spec.scenario = load_scenario(base / doc["scenario"].get<std::string>());
  if (doc.contains("reference_path")) {
    spec.reference = load_reference_series(base / doc["reference_path"].get<std::string>());
  } else if (spec.scenario.reference) {
    spec.reference = *spec.scenario.reference;
  } else {
    throw ConfigError("calibration needs a reference series");
  }
  if (doc.contains("objective")) spec.objective = parse_objective(doc["objective"].get<std::string>());
  if (doc.contains("workers")) spec.workers = doc["workers"].get<int>();
  if (!doc.contains("space") || !doc["space"].is_object()) throw ConfigError("calibration spec needs a space object");
  for (const auto& [name, values] : doc["space"].items()) {
    if (!values.is_array()) throw ConfigError("space." + name + " must be an array of numbers");
    SearchDimension dim{name, {}};
    for (const auto& v : values) {
      if (!v.is_number()) throw ConfigError("space." + name + " must be an array of numbers");
      dim.values.push_back(v.get<double>());
    }
    spec.space.push_back(std::move(dim));
  }
  return spec;
}

AttitudeSeries block_average(const AttitudeSeries& s, int block) {
  Trajectory t;
  for (double v : s.values) t.push_back(OpinionValue(v));
  return downsample(t, block, s.label);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Opinion dynamics simulator with scripted or model-backed opinion leaders", "fdesim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", code_version());

  std::string scenario_path, out_dir, kind_name, spec_path, sim_path, ref_path;
  int downsample_rounds = 0;

  auto* run = app.add_subcommand("run", "Run a scenario and write its outputs");
  run->add_option("scenario", scenario_path, "Scenario file")->required();
  run->add_option("--out", out_dir, "Output directory (overrides the scenario)");

  auto* baseline = app.add_subcommand("baseline", "Run a comparison model on a scenario");
  baseline->add_option("kind", kind_name, "pure-ca, hk or oracle-only")->required();
  baseline->add_option("scenario", scenario_path, "Scenario file")->required();
  baseline->add_option("--out", out_dir, "Output directory (overrides the scenario)");

  auto* calibrate = app.add_subcommand("calibrate", "Grid-search parameters against a reference");
  calibrate->add_option("spec", spec_path, "Calibration spec file")->required();
  calibrate->add_option("--out", out_dir, "Score table path (default: calibration.csv next to the spec)");

  auto* eval = app.add_subcommand("eval", "Compare two series with DTW and correlation");
  eval->add_option("simulated", sim_path, "Simulated series")->required();
  eval->add_option("reference", ref_path, "Reference series")->required();
  eval->add_option("--downsample", downsample_rounds, "Average the simulated series in blocks of N rounds")
      ->check(CLI::PositiveNumber);

  auto* ablate = app.add_subcommand("ablate", "Compare the model with and without the CA term");
  ablate->add_option("scenario", scenario_path, "Scenario file with a reference")->required();

  std::vector<std::string> args(argv + 1, argv + argc);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << code_version() << '\n';
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "fdesim: " << e.what() << '\n';
    err << "run 'fdesim --help' for usage\n";
    return 2;
  }

  try {
    if (*run) {
      print_report(out, run_scenario(load_with_output(scenario_path, out_dir)));
    } else if (*baseline) {
      const auto kind = parse_baseline_kind(kind_name);
      print_report(out, run_scenario(load_with_output(scenario_path, out_dir), model_for(kind)));
    } else if (*calibrate) {
      const auto spec = load_calibration_spec(spec_path);
      const auto result = grid_search(spec.space, spec.scenario, spec.reference, spec.objective, spec.workers);
      const fs::path table = out_dir.empty() ? fs::path(spec_path).parent_path() / "calibration.csv" : fs::path(out_dir);
      write_score_table(result, table);
      const auto& best = result.table[result.best_index];
      out << "objective " << to_string(result.objective) << '\n';
      for (std::size_t d = 0; d < result.names.size(); ++d) out << result.names[d] << ' ' << best.point[d] << '\n';
      out << "score " << fixed6(result.best_score) << '\n';
      out << "table " << table.string() << '\n';
    } else if (*eval) {
      auto sim = load_reference_series(sim_path);
      if (downsample_rounds > 0) sim = block_average(sim, downsample_rounds);
      print_metrics(out, evaluate(sim, load_reference_series(ref_path)));
    } else if (*ablate) {
      const auto cfg = load_scenario(scenario_path);
      if (!cfg.reference) throw ConfigError("ablate needs a scenario with a reference series");
      RawParams no_ca = cfg.params.raw();
      no_ca.alpha = 0.0;
      const std::pair<const char*, ScenarioConfig> variants[] = {{"with-CA", cfg}, {"without-CA", with_params(cfg, no_ca)}};
      out << "label,dtw,corr\n";
      for (const auto& [label, variant] : variants) {
        const auto run_result = run_model(variant, ModelKind::FdeLlm);
        const auto m = evaluate(downsample(run_result.trajectory, variant.rounds_per_day), *variant.reference);
        out << label << ',' << fixed6(m.dtw) << ',' << (m.pearson ? fixed6(*m.pearson) : std::string("nan")) << '\n';
      }
    }
  } catch (const std::exception& e) {
    std::string msg = e.what();
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    err << "fdesim: error: " << msg << '\n';
    return 1;
  }
  return 0;
}

}  // namespace fdesim
