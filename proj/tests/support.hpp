#pragma once

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "fdesim/harness.hpp"

namespace support {

inline std::filesystem::path temp_dir(const std::string& name) {
  static std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("fdesim-" + name + "-" + std::to_string(rd()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

/// Reversal scenario: stance +1 until `flip`, then -1, on a leader grid of
/// `side` x `side` (followers 3x per side).
inline fdesim::ScenarioConfig reversal(int side, int rounds, int flip, std::uint64_t seed) {
  using namespace fdesim;
  ScenarioConfig cfg;
  RawParams raw = default_raw_params({side, side});
  raw.rounds = rounds;
  raw.seed = seed;
  cfg.params = validate_params(raw);
  cfg.timeline = NewsTimeline({{0, DiscreteAttitude::Support, "A video claims a rider was assaulted."},
                               {flip, DiscreteAttitude::Oppose, "Police say the rider staged it."}});
  cfg.oracle = ScriptedOracleSpec{{ScheduleSegment{0, flip - 1, DiscreteAttitude::Support},
                                   ScheduleSegment{flip, std::nullopt, DiscreteAttitude::Oppose}}};
  return cfg;
}

}  // namespace support
