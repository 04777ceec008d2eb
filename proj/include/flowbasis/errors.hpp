#pragma once

#include <stdexcept>
#include <string>

namespace flowbasis {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid input to an operation (sizes, ranges, malformed arguments).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

// A computation produced a non-finite or otherwise unusable number.
class NumericError : public Error {
 public:
  using Error::Error;
};

// An iterative method hit its iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

// Hamiltonian assembly failed a consistency check (asymmetry, monotonicity).
class AssemblyError : public Error {
 public:
  using Error::Error;
};

// Experiment configuration could not be parsed or validated.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace flowbasis
