#pragma once

#include <cstddef>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace shiproll {

/// Shortest readable rendering of a double for diagnostics.
inline std::string format_g(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Precondition and input-validation failures derive from std::invalid_argument;
// everything detected while computing derives from std::runtime_error.

class GridMismatchError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DegenerateTargetError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IntegrationBlowup : public std::runtime_error {
 public:
  IntegrationBlowup(std::size_t path_index, double time, const std::string& detail = {})
      : std::runtime_error("integration blowup on path " + std::to_string(path_index) +
                           " at t=" + format_g(time) +
                           (detail.empty() ? std::string{} : ": " + detail)),
        path_index_(path_index),
        time_(time) {}

  std::size_t path_index() const noexcept { return path_index_; }
  double time() const noexcept { return time_; }

 private:
  std::size_t path_index_;
  double time_;
};

class EmptyPopulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a time step exceeds the scheme's admissible bound.
class StabilityError : public std::runtime_error {
 public:
  StabilityError(double requested_dt, double admissible_dt)
      : std::runtime_error("time step " + format_g(requested_dt) +
                           " exceeds the admissible dt " + format_g(admissible_dt)),
        requested_(requested_dt),
        admissible_(admissible_dt) {}

  double requested_dt() const noexcept { return requested_; }
  double admissible_dt() const noexcept { return admissible_; }

 private:
  double requested_;
  double admissible_;
};

class NoClosedFormError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LogDomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotConvergedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientDataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace shiproll
