#pragma once

#include <stdexcept>
#include <string>

namespace abcmc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter lies outside the domain of the law or operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inputs have incompatible lengths or dimensions.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Too few observations for the requested statistic.
class InsufficientSampleError : public Error {
 public:
  using Error::Error;
};

/// Normalising constant is zero, so a ratio is undefined.
class DegenerateNormalizationError : public Error {
 public:
  using Error::Error;
};

/// A simulated dataset cannot be used (e.g. empty feature set). The engine
/// resamples the draw with a fresh stream when it sees this.
class SimulationError : public Error {
 public:
  using Error::Error;
};

/// Threshold policy selects no draws, or the run is not ready for thresholding.
class PolicyError : public Error {
 public:
  using Error::Error;
};

/// Malformed configuration or input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace abcmc
