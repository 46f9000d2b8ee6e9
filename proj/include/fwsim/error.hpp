#pragma once

#include <stdexcept>
#include <string>

namespace fwsim {

/// Base class for every error raised by the simulation library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent configuration / input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the validity domain of a model (atmosphere layer,
/// aerodynamic envelope, ...).
class EnvelopeError : public Error {
 public:
  using Error::Error;
};

/// A propagated state became non-finite.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// A rejection sampler exhausted its redraw budget.
class SamplingError : public Error {
 public:
  using Error::Error;
};

}  // namespace fwsim
