#pragma once

#include <stdexcept>
#include <string>

namespace ccpwf {

// Malformed configuration or command-line input.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The matrix root could not be projected onto a valid transition matrix.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A dependence construction cannot reproduce the prescribed marginal rows.
class InfeasibleRowError : public std::runtime_error {
 public:
  InfeasibleRowError(std::size_t member, std::string direction, const std::string& what)
      : std::runtime_error(what), member_(member), direction_(std::move(direction)) {}

  std::size_t member() const { return member_; }
  const std::string& direction() const { return direction_; }

 private:
  std::size_t member_;
  std::string direction_;
};

}  // namespace ccpwf
