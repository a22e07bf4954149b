#ifndef SENSELECT_ERRORS_HPP
#define SENSELECT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace senselect {

// Base of everything this library throws.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Invalid configuration, arguments, or validation failure (CLI exit code 2).
struct ConfigError : Error {
  using Error::Error;
};

// Runtime numerical failure (CLI exit code 3).
struct NumericalError : Error {
  using Error::Error;
};

struct SingularSubmatrix : NumericalError {
  using NumericalError::NumericalError;
};

struct DegenerateNoise : NumericalError {
  using NumericalError::NumericalError;
};

struct InvalidEnergy : NumericalError {
  using NumericalError::NumericalError;
};

struct WeightViolation : NumericalError {
  using NumericalError::NumericalError;
};

struct NotStochastic : NumericalError {
  using NumericalError::NumericalError;
};

struct Infeasible : NumericalError {
  using NumericalError::NumericalError;
};

struct ScheduleViolation : ConfigError {
  using ConfigError::ConfigError;
};

struct TooLarge : ConfigError {
  using ConfigError::ConfigError;
};

struct DimensionMismatch : ConfigError {
  using ConfigError::ConfigError;
};

struct EmptyWindow : ConfigError {
  using ConfigError::ConfigError;
};

struct UnknownPreset : ConfigError {
  using ConfigError::ConfigError;
};

}  // namespace senselect

#endif  // SENSELECT_ERRORS_HPP
