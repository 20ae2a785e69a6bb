#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace topoclock {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class CriticalPointError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

// Thrown when amplitude reaches the outermost sites of the finite chain.
class EdgeLeakageError : public Error {
 public:
  EdgeLeakageError(double time, double population)
      : Error(describe(time, population)),
        time_(time),
        population_(population) {}

  double time() const noexcept { return time_; }
  double population() const noexcept { return population_; }

 private:
  static std::string describe(double time, double population) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "edge leakage: population %.3e on boundary sites at t = %.6g s",
                  population, time);
    return buf;
  }
  double time_;
  double population_;
};

}  // namespace topoclock
