#pragma once

#include <stdexcept>
#include <string>

namespace storm {

// Base class for everything thrown by the library.
struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed caller input: wrong dimensions, out-of-range codes, bad labels,
// empty datasets. Maps to CLI exit code 1.
struct InputError : Error {
  using Error::Error;
};

// A vector that was supposed to live inside the unit ball does not.
struct NormalizationError : InputError {
  using InputError::InputError;
};

// Bad bytes while reading a serialized sketch.
struct ParseError : InputError {
  using InputError::InputError;
};

// Two sketches with mismatched headers cannot be merged.
struct IncompatibleSketchError : InputError {
  using InputError::InputError;
};

// Requested sketch would exceed the configured memory cap.
struct CapacityError : InputError {
  using InputError::InputError;
};

// Querying a sketch with no inserts.
struct EmptySketchError : InputError {
  using InputError::InputError;
};

// Numerical failures: divergence, singular systems, gradient singularities.
// Map to CLI exit code 2.
struct NumericalError : Error {
  using Error::Error;
};

struct DivergenceError : NumericalError {
  using NumericalError::NumericalError;
};

struct SingularityError : NumericalError {
  using NumericalError::NumericalError;
};

}  // namespace storm
