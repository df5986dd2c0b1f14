#pragma once

#include <stdexcept>
#include <string>

namespace nlwave {

// Base of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// Two fields that must share a grid do not.
class GridMismatch : public Error {
 public:
  using Error::Error;
};

// Signal would reach the Dirichlet wall at r_max before the requested time.
class DomainTooSmall : public Error {
 public:
  using Error::Error;
};

// Non-finite values appeared during time stepping. Carries the last time at
// which the state was still finite.
class Overflow : public Error {
 public:
  Overflow(const std::string& what, double last_good_time)
      : Error(what), last_good_time_(last_good_time) {}
  double last_good_time() const noexcept { return last_good_time_; }

 private:
  double last_good_time_;
};

// Configuration file problems (syntax, unknown keys, constraint violations).
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace nlwave
