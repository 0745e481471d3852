#pragma once

#include <stdexcept>
#include <string>

namespace nematic {

/// Argument outside the domain of a constitutive law (e.g. negative temperature).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Argument outside an admissible range (theta below the floor, m > N, exponent ranges).
class RangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// Field shapes that do not match the grid they are used with.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// More basis modes requested than the grid can represent alias-free.
class CapacityError : public std::length_error {
 public:
  CapacityError(const std::string& what, std::size_t maximum)
      : std::length_error(what), maximum_(maximum) {}
  std::size_t maximum() const noexcept { return maximum_; }

 private:
  std::size_t maximum_;
};

/// Malformed or inconsistent run configuration. Carries the offending line (0 if none).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// Failed reads or writes of snapshots, tables and reports.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace nematic
