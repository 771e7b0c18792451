#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace sls {

/// Invalid user input; field() names the offending configuration key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// A time integration produced non-finite values.
class NumericalAbort : public std::runtime_error {
 public:
  NumericalAbort(const std::string& what, double t, double max_field)
      : std::runtime_error(what + " (t = " + std::to_string(t) +
                           ", max|field| = " + std::to_string(max_field) + ")"),
        message_(what),
        t_(t),
        max_field_(max_field) {}
  const std::string& message() const noexcept { return message_; }
  double time() const noexcept { return t_; }
  double max_field() const noexcept { return max_field_; }

 private:
  std::string message_;
  double t_;
  double max_field_;
};

}  // namespace sls
