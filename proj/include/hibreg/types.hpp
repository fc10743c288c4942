#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>

namespace hibreg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments or out-of-domain inputs (precondition violations).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent input data (CSV schema, row-level validation).
class IngestError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure during computation (Cholesky breakdown, saturation,
/// non-finite likelihood at initialization).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Probabilities are clamped to this range before taking logs so that
// Metropolis-Hastings acceptance ratios stay finite.
inline constexpr double kProbFloor = 1e-300;
inline constexpr double kProbCeil = 1.0 - 1e-16;

inline double clamp_probability(double p) {
  if (p < kProbFloor) return kProbFloor;
  if (p > kProbCeil) return kProbCeil;
  return p;
}

}  // namespace hibreg
