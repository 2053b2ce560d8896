#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdesim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One or more parameters violated their range constraints. Every offending
/// field is listed, not just the first.
class ParamError : public Error {
 public:
  explicit ParamError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Malformed scenario, timeline, schedule or provider configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Bad input data (reference series, trajectory files).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Metric undefined for the given input (length mismatch, zero variance...).
class MetricError : public Error {
 public:
  using Error::Error;
};

/// The oracle could not be reached. Rounds that hit this are resumable.
class OracleTransportError : public Error {
 public:
  explicit OracleTransportError(const std::string& what, std::optional<int> status = std::nullopt)
      : Error(what), status_(status) {}
  std::optional<int> status() const noexcept { return status_; }

 private:
  std::optional<int> status_;
};

/// The oracle answered, but the answer is not a legal attitude or action.
class OracleSemanticError : public Error {
 public:
  OracleSemanticError(const std::string& what, std::string raw_response,
                      std::optional<int> agent = std::nullopt);
  const std::string& raw_response() const noexcept { return raw_; }
  std::optional<int> agent() const noexcept { return agent_; }

 private:
  std::string raw_;
  std::optional<int> agent_;
};

}  // namespace fdesim
