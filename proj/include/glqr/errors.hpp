#pragma once

#include <stdexcept>
#include <string>

namespace glqr {

// Incompatible shapes: grid sizes, matrix dimensions, time grids.
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Invalid data at construction: asymmetric kernels, bound violations,
// rank-deficient bases.
class ConstructionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A numerical certificate (invariance or low-rank residual) exceeded its
// threshold. The message carries the per-operator residuals.
class CertificateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A backward or forward integration produced non-finite values.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double failure_time)
      : std::runtime_error(what), failure_time_(failure_time) {}
  double failure_time() const { return failure_time_; }

 private:
  double failure_time_;
};

// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace glqr
