#pragma once

// Fidelity metrics between simulated and reference attitude series.

#include <optional>
#include <string>
#include <vector>

#include "fdesim/core.hpp"

namespace fdesim {

struct AttitudeSeries {
  std::vector<double> values;
  std::string label;
};

/// Product-moment correlation. Throws MetricError on length mismatch, fewer
/// than two points, or a constant series (the correlation is undefined, not 0).
double pearson(const AttitudeSeries& s, const AttitudeSeries& t);

/// Dynamic time warping distance: the minimum over monotone, boundary-complete
/// alignments (match / insert / delete steps) of sqrt(sum of squared gaps).
/// The series may differ in length. Throws MetricError if either is empty.
double dtw(const AttitudeSeries& s, const AttitudeSeries& t);

/// Averages consecutive blocks of `rounds_per_day` rounds; a trailing partial
/// block is averaged over the rounds it has.
AttitudeSeries downsample(const Trajectory& trajectory, int rounds_per_day, std::string label = "simulated");

struct MetricPair {
  double dtw = 0.0;
  std::optional<double> pearson;  // empty when undefined
  std::string pearson_error;
};

/// Both metrics; an undefined correlation is reported, not thrown.
MetricPair evaluate(const AttitudeSeries& simulated, const AttitudeSeries& reference);

}  // namespace fdesim
