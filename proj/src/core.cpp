#include "fdesim/core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fdesim/rng.hpp"

namespace fdesim {

namespace {

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

}  // namespace

ParamError::ParamError(std::vector<std::string> problems)
    : Error("invalid parameters: " + join(problems, "; ")), problems_(std::move(problems)) {}

OracleSemanticError::OracleSemanticError(const std::string& what, std::string raw_response,
                                         std::optional<int> agent)
    : Error(agent ? "agent " + std::to_string(*agent) + ": " + what : what),
      raw_(std::move(raw_response)),
      agent_(agent) {}

OpinionValue::OpinionValue(double v) : value_(v) {
  if (!std::isfinite(v) || v < -1.0 || v > 1.0) {
    std::ostringstream msg;
    msg << "opinion value " << v << " outside [-1, 1]";
    throw DataError(msg.str());
  }
}

OpinionValue clip(double v) {
  if (!std::isfinite(v)) throw DataError("cannot clip a non-finite value");
  return OpinionValue(std::min(std::max(v, -1.0), 1.0));
}

DiscreteAttitude attitude_from_int(long long level) {
  switch (level) {
    case -1: return DiscreteAttitude::Oppose;
    case 0: return DiscreteAttitude::Neutral;
    case 1: return DiscreteAttitude::Support;
    default: throw ConfigError("attitude must be one of -1, 0, 1 (got " + std::to_string(level) + ")");
  }
}

std::string to_string(DiscreteAttitude a) {
  switch (a) {
    case DiscreteAttitude::Oppose: return "-1";
    case DiscreteAttitude::Neutral: return "0";
    case DiscreteAttitude::Support: return "+1";
  }
  return "0";
}

SimulationParams::SimulationParams() : SimulationParams(validate_params(RawParams{})) {}

SimulationParams validate_params(const RawParams& raw) {
  std::vector<std::string> problems;
  auto unit = [&](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) problems.push_back(std::string(name) + " out of [0,1]");
  };
  auto nonneg = [&](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) problems.push_back(std::string(name) + " must be finite and >= 0");
  };
  unit(raw.r, "r");
  nonneg(raw.w, "w");
  nonneg(raw.epsilon, "epsilon");
  unit(raw.alpha, "alpha");
  nonneg(raw.lambda, "lambda");
  unit(raw.gamma, "gamma");
  unit(raw.beta, "beta");
  unit(raw.init_noise, "init_noise");
  if (!(raw.follower_init >= -1.0 && raw.follower_init <= 1.0))
    problems.push_back("follower_init out of [-1,1]");
  if (raw.rounds < 0) problems.push_back("rounds must be >= 0");

  RawParams resolved = raw;
  auto shape = [&](GridShape s, std::optional<int> agents, const char* grid_name,
                   const char* agents_name) -> std::optional<int> {
    if (s.rows <= 0 || s.cols <= 0) {
      problems.push_back(std::string(grid_name) + " must have positive rows and cols");
      return std::nullopt;
    }
    int n = agents.value_or(s.cells());
    if (n < 1 || n > s.cells()) {
      problems.push_back(std::string(agents_name) + " out of [1," + std::to_string(s.cells()) + "]");
      return std::nullopt;
    }
    return n;
  };
  resolved.leader_agents = shape(raw.leader_grid, raw.leader_agents, "leader_grid", "leader_agents");
  resolved.follower_agents =
      shape(raw.follower_grid, raw.follower_agents, "follower_grid", "follower_agents");

  if (raw.enforce_ratio && resolved.leader_agents && resolved.follower_agents &&
      *resolved.follower_agents != 9 * *resolved.leader_agents) {
    problems.push_back("leader:follower ratio must be 1:9 (got " +
                       std::to_string(*resolved.leader_agents) + ":" +
                       std::to_string(*resolved.follower_agents) + ")");
  }

  if (!problems.empty()) throw ParamError(std::move(problems));
  return SimulationParams(resolved);
}

RawParams default_raw_params(GridShape leaders) {
  RawParams raw;
  raw.leader_grid = leaders;
  raw.follower_grid = {leaders.rows * 3, leaders.cols * 3};
  raw.leader_agents.reset();
  raw.follower_agents.reset();
  return raw;
}

NewsTimeline::NewsTimeline() : events_{NewsEvent{0, DiscreteAttitude::Neutral, ""}} {}

NewsTimeline::NewsTimeline(std::vector<NewsEvent> events) : events_(std::move(events)) {
  if (events_.empty() || events_.front().round != 0)
    throw ConfigError("news timeline needs an event at round 0");
  for (std::size_t i = 1; i < events_.size(); ++i) {
    if (events_[i].round <= events_[i - 1].round)
      throw ConfigError("news event rounds must be strictly increasing");
  }
}

const NewsEvent* NewsTimeline::event_at(int round) const noexcept {
  auto it = std::lower_bound(events_.begin(), events_.end(), round,
                             [](const NewsEvent& e, int r) { return e.round < r; });
  return it != events_.end() && it->round == round ? &*it : nullptr;
}

const NewsEvent& NewsTimeline::latest_at(int round) const {
  auto it = std::upper_bound(events_.begin(), events_.end(), round,
                             [](int r, const NewsEvent& e) { return r < e.round; });
  if (it == events_.begin()) throw ConfigError("no news before round " + std::to_string(round));
  return *std::prev(it);
}

std::vector<double> Trajectory::values() const {
  std::vector<double> out;
  out.reserve(points_.size());
  for (const auto& p : points_) out.push_back(p.mean_attitude.value());
  return out;
}

Population init_population(const SimulationParams& p, DiscreteAttitude initial_stance) {
  Population pop{
      OpinionGrid(p.leader_grid(), OpinionValue{}, p.leader_agents()),
      OpinionGrid(p.follower_grid(), OpinionValue{}, p.follower_agents()),
  };
  const OpinionValue stance(to_real(initial_stance));
  for (int i = 0; i < pop.leaders.size(); ++i) {
    if (pop.leaders.active(i)) pop.leaders[i] = stance;
  }

  const KeyedRng rng(p.seed());
  const double delta = p.init_noise();
  for (int i = 0; i < pop.followers.size(); ++i) {
    if (!pop.followers.active(i)) continue;
    double noise = 0.0;
    if (delta > 0.0) noise = (2.0 * rng.uniform(Stream::InitNoise, static_cast<std::uint64_t>(i), 0) - 1.0) * delta;
    pop.followers[i] = clip(p.follower_init() + noise);
  }
  return pop;
}

}  // namespace fdesim
