#pragma once

// Delimited text I/O for attitude series and trajectories.

#include <filesystem>
#include <string>

#include "fdesim/core.hpp"
#include "fdesim/metrics.hpp"

namespace fdesim {

/// Two columns "index,value" per line, values in [-1, 1]. A first line that
/// does not start with a number is treated as a header. Throws DataError with
/// the 1-based line number for malformed rows or out-of-range values, and for
/// files with no data rows.
AttitudeSeries load_reference_series(const std::filesystem::path& path);

/// Like load_reference_series, but the index column must count 0, 1, 2...
Trajectory load_trajectory(const std::filesystem::path& path);

/// Header "round,mean_attitude", then "round,value" rows with six decimals and
/// a trailing newline. Throws Error when the path cannot be written.
void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path);

/// Same layout for a daily series, header "day,mean_attitude".
void write_series(const AttitudeSeries& series, const std::filesystem::path& path);

/// Fixed six-decimal rendering with negative zero folded to "0.000000".
std::string format_fixed6(double v);

}  // namespace fdesim
