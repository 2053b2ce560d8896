#include "fdesim/series_io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace fdesim {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& field, double& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size() && errno == 0 && std::isfinite(out);
}

bool parse_index(const std::string& field, long long& out) {
  const std::string t = trim(field);
  if (t.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtoll(t.c_str(), &end, 10);
  return end == t.c_str() + t.size() && errno == 0;
}

bool starts_numeric(const std::string& line) {
  const std::string t = trim(line);
  return !t.empty() && (std::isdigit(static_cast<unsigned char>(t[0])) || t[0] == '-' || t[0] == '+' || t[0] == '.');
}

struct Row {
  long long index;
  double value;
};

std::vector<Row> read_rows(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<Row> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    if (lineno == 1 && !starts_numeric(line)) continue;
    const std::string where = path.string() + ":" + std::to_string(lineno) + ": ";
    const auto comma = line.find(',');
    if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos)
      throw DataError(where + "expected two comma-separated columns");
    Row row{};
    if (!parse_index(line.substr(0, comma), row.index)) throw DataError(where + "malformed index");
    if (!parse_double(line.substr(comma + 1), row.value)) throw DataError(where + "malformed value");
    if (row.value < -1.0 || row.value > 1.0) throw DataError(where + "attitude out of [-1, 1]");
    rows.push_back(row);
  }
  return rows;
}

void write_rows(const std::filesystem::path& path, const char* header, const std::vector<double>& values) {
  std::ostringstream os;
  os << header << '\n';
  for (std::size_t i = 0; i < values.size(); ++i) os << i << ',' << format_fixed6(values[i]) << '\n';
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path.string());
  out << os.str();
  out.flush();
  if (!out) throw Error("failed writing " + path.string());
}

}  // namespace

std::string format_fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

AttitudeSeries load_reference_series(const std::filesystem::path& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw DataError(path.string() + ": no data rows");
  AttitudeSeries series{{}, path.stem().string()};
  for (const auto& r : rows) series.values.push_back(r.value);
  return series;
}

Trajectory load_trajectory(const std::filesystem::path& path) {
  Trajectory t;
  for (const auto& r : read_rows(path)) {
    if (r.index != static_cast<long long>(t.size()))
      throw DataError(path.string() + ": rounds must count up from 0 (found " + std::to_string(r.index) + ")");
    t.push_back(OpinionValue(r.value));
  }
  return t;
}

void write_trajectory(const Trajectory& trajectory, const std::filesystem::path& path) {
  write_rows(path, "round,mean_attitude", trajectory.values());
}

void write_series(const AttitudeSeries& series, const std::filesystem::path& path) {
  write_rows(path, "day,mean_attitude", series.values);
}

}  // namespace fdesim
