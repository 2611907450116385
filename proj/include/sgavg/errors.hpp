#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sgavg {

/// Precondition on an argument was violated (length mismatch, bad sign, ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A configuration value is missing or inconsistent. `field` names the
/// offending key so the CLI can report it in machine-parsable form.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error(message), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// Non-finite or runaway field values during time stepping.
class BlowUpError : public std::runtime_error {
 public:
  BlowUpError(double time, const std::string& message)
      : std::runtime_error(message), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// A numerical oracle could not certify its result.
class OracleFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Level-crossing kink tracking failed on a snapshot.
class TrackingError : public std::runtime_error {
 public:
  TrackingError(double time, const std::string& message)
      : std::runtime_error(message), time_(time) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

}  // namespace sgavg
