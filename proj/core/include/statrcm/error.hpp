#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace statrcm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "error"; }
};

/// A value lies outside the domain of a model equation (e.g. a non-positive log argument).
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double offending_value)
      : Error(what + " (value = " + std::to_string(offending_value) + ")"), value_(offending_value) {}
  double value() const noexcept { return value_; }
  const char* kind() const noexcept override { return "domain"; }

 private:
  double value_;
};

/// A recursion produced a non-finite or singular quantity at a given time index.
class NumericalError : public Error {
 public:
  NumericalError(const std::string& what, std::size_t time_index)
      : Error(what + " at time index " + std::to_string(time_index)), time_index_(time_index) {}
  std::size_t time_index() const noexcept { return time_index_; }
  const char* kind() const noexcept override { return "numerical"; }

 private:
  std::size_t time_index_;
};

class DataError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "data"; }
};

class ConfigError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "config"; }
};

class EstimationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "estimation"; }
};

class SimulationError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "simulation"; }
};

}  // namespace statrcm
