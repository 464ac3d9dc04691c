#pragma once

#include <stdexcept>
#include <string>

namespace screenopt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, out-of-range levels, invalid parameters.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// Requested conference-matrix order is not in the embedded catalog.
class UnsupportedOrder : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// A design or configuration that cannot be realised (e.g. n < k + 1).
class Infeasible : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

/// X1'X1 is singular, so main-effect quantities are undefined.
class SingularInformation : public Error {
 public:
  using Error::Error;
};

/// The design leaves no error degrees of freedom (g = 0).
class NoErrorDegreesOfFreedom : public Error {
 public:
  using Error::Error;
};

/// No design in a pool meets the ECI threshold S.
class NoDesignMeetsThreshold : public Error {
 public:
  using Error::Error;
};

}  // namespace screenopt
