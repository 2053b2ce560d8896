#include "fdesim/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "fdesim/simulation.hpp"

namespace fdesim {

std::string to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::PureCA: return "pure-ca";
    case BaselineKind::HK: return "hk";
    case BaselineKind::OracleOnly: return "oracle-only";
  }
  return "pure-ca";
}

BaselineKind parse_baseline_kind(std::string_view name) {
  std::string n(name);
  std::replace(n.begin(), n.end(), '_', '-');
  if (n == "pure-ca") return BaselineKind::PureCA;
  if (n == "hk") return BaselineKind::HK;
  if (n == "oracle-only") return BaselineKind::OracleOnly;
  throw ConfigError("unknown baseline kind '" + std::string(name) + "' (expected pure-ca, hk or oracle-only)");
}

namespace {

double windowed_mean(const std::vector<double>& sorted, double center, double epsilon) {
  // Search a slightly wider window, then apply the exact |d| <= eps test so
  // rounding in center +- eps cannot drop a member. Offsets from the center
  // are averaged so a window of equal values returns that value exactly.
  constexpr double slack = 1e-9;
  const auto lo = std::lower_bound(sorted.begin(), sorted.end(), center - epsilon - slack);
  const auto hi = std::upper_bound(lo, sorted.end(), center + epsilon + slack);
  double sum = 0.0;
  std::size_t n = 0;
  for (auto it = lo; it != hi; ++it) {
    const double d = *it - center;
    if (std::abs(d) <= epsilon) {
      sum += d;
      ++n;
    }
  }
  return n ? center + sum / static_cast<double>(n) : center;
}

std::vector<double> sorted_values(std::span<const OpinionValue> opinions) {
  std::vector<double> v;
  v.reserve(opinions.size());
  for (auto o : opinions) v.push_back(o.value());
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

OpinionValue hk_update(OpinionValue o_i, std::span<const OpinionValue> all_opinions, double epsilon) {
  return clip(windowed_mean(sorted_values(all_opinions), o_i.value(), epsilon));
}

std::vector<OpinionValue> hk_step(std::span<const OpinionValue> opinions, double epsilon) {
  const auto sorted = sorted_values(opinions);
  std::vector<OpinionValue> out;
  out.reserve(opinions.size());
  for (auto o : opinions) out.push_back(clip(windowed_mean(sorted, o.value(), epsilon)));
  return out;
}

Trajectory run_baseline(BaselineKind kind, const ScenarioConfig& scenario) {
  return run_model(scenario, model_for(kind)).trajectory;
}

}  // namespace fdesim
