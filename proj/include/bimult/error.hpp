#pragma once

#include <stdexcept>
#include <string>

namespace bimult {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shapes, boxes or dimensions of two operands disagree.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

/// An input carries spectral content outside the admissible band.
class BandLimitExceeded : public Error {
 public:
  using Error::Error;
};

/// A precondition on an argument value does not hold.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Parsed data does not match the expected schema.
class SchemaError : public Error {
 public:
  using Error::Error;
};

}  // namespace bimult
