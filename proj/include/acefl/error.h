#ifndef ACEFL_ERROR_H_
#define ACEFL_ERROR_H_

#include <stdexcept>
#include <string>

namespace acefl {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vectors or matrices of incompatible shape were combined.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A direction-dependent quantity (cosine, normalization) was requested for a
// zero vector.
class ZeroNormError : public Error {
 public:
  using Error::Error;
};

// An argument violated the documented precondition of an operation.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

// Training or evaluation produced a NaN/Inf.
class NumericError : public Error {
 public:
  using Error::Error;
};

// Malformed configuration, CSV or JSONL input.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace acefl

#endif  // ACEFL_ERROR_H_
