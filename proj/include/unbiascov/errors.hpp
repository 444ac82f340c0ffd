#pragma once

#include <stdexcept>
#include <string>

namespace unbiascov {

// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Construction-time data problems: nonfinite values, negative weights, too few samples.
struct InvalidData : Error {
  using Error::Error;
};

struct AllWeightsZero : Error {
  AllWeightsZero() : Error("sum of weights is zero") {}
};

// Effective sample size <= 1: (sum w)^2 <= sum w^2, or fewer than two positive weights.
struct DegenerateWeights : Error {
  using Error::Error;
};

struct LengthMismatch : Error {
  using Error::Error;
};

struct LagOutOfRange : Error {
  explicit LagOutOfRange(int lag) : Error("lag " + std::to_string(lag) + " out of range"), lag(lag) {}
  int lag;
};

struct InvalidRange : Error {
  using Error::Error;
};

struct RangeMismatch : Error {
  using Error::Error;
};

struct DtMismatch : Error {
  using Error::Error;
};

// The weight overlap sum Y_k vanished at a requested lag.
struct EmptyOverlap : Error {
  explicit EmptyOverlap(int lag)
      : Error("empty weight overlap (Y = 0) at lag " + std::to_string(lag)), lag(lag) {}
  int lag;
};

// Imaginary residue of an inverse transform exceeded tolerance; indicates a transform-length bug.
struct NumericalResidue : Error {
  using Error::Error;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct IllConditioned : Error {
  using Error::Error;
};

// File/CSV ingestion problems (CLI layer).
struct ParseError : Error {
  using Error::Error;
};

}  // namespace unbiascov
