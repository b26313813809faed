#pragma once

#include <stdexcept>
#include <string>

namespace authsim {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument to an operation (non-positive mean, empty target set, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// A station with utilization >= 1. station() names the violating stage.
class StabilityError : public Error {
 public:
  StabilityError(std::string station, double utilization);

  const std::string& station() const noexcept { return station_; }
  double utilization() const noexcept { return utilization_; }

 private:
  std::string station_;
  double utilization_;
};

class PastEventError : public Error {
 public:
  using Error::Error;
};

class EmptySampleError : public Error {
 public:
  using Error::Error;
};

// Malformed experiment configuration text or flag value.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace authsim
