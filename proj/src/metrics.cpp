#include "fdesim/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdesim {

double pearson(const AttitudeSeries& s, const AttitudeSeries& t) {
  const auto& a = s.values;
  const auto& b = t.values;
  if (a.size() != b.size()) throw MetricError("correlation needs series of equal length");
  if (a.size() < 2) throw MetricError("correlation needs at least two points");

  const auto constant = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  };
  if (constant(a) || constant(b)) throw MetricError("correlation undefined: a series has zero variance");

  const double n = static_cast<double>(a.size());
  double mean_a = 0.0, mean_b = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    mean_a += a[i];
    mean_b += b[i];
  }
  mean_a /= n;
  mean_b /= n;

  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - mean_a;
    const double db = b[i] - mean_b;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) throw MetricError("correlation undefined: a series has zero variance");
  const double r = sab / std::sqrt(saa * sbb);
  return std::clamp(r, -1.0, 1.0);
}

double dtw(const AttitudeSeries& s, const AttitudeSeries& t) {
  const auto& a = s.values;
  const auto& b = t.values;
  if (a.empty() || b.empty()) throw MetricError("DTW needs non-empty series");

  // Rolling rows of cumulative squared cost; the root is taken once.
  const std::size_t m = b.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double d = a[i - 1] - b[j - 1];
      cur[j] = d * d + std::min({prev[j - 1], prev[j], cur[j - 1]});
    }
    std::swap(prev, cur);
  }
  return std::sqrt(prev[m]);
}

AttitudeSeries downsample(const Trajectory& trajectory, int rounds_per_day, std::string label) {
  if (rounds_per_day <= 0) throw ConfigError("rounds_per_day must be positive");
  AttitudeSeries out{{}, std::move(label)};
  const auto values = trajectory.values();
  for (std::size_t start = 0; start < values.size(); start += static_cast<std::size_t>(rounds_per_day)) {
    const std::size_t end = std::min(values.size(), start + static_cast<std::size_t>(rounds_per_day));
    double sum = 0.0;
    for (std::size_t i = start; i < end; ++i) sum += values[i];
    out.values.push_back(sum / static_cast<double>(end - start));
  }
  return out;
}

MetricPair evaluate(const AttitudeSeries& simulated, const AttitudeSeries& reference) {
  MetricPair out;
  out.dtw = dtw(simulated, reference);
  try {
    out.pearson = pearson(simulated, reference);
  } catch (const MetricError& e) {
    out.pearson_error = e.what();
  }
  return out;
}

}  // namespace fdesim
