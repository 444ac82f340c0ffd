#pragma once

#include <span>

#include "unbiascov/covariance.hpp"
#include "unbiascov/linalg.hpp"

namespace unbiascov {

// Which summation path evaluates the lag sums. The direct path is the serial
// reference implementation; production code uses the FFT path.
enum class SumPath { fft, direct };

// Square map A from a true covariance function on a lag window onto the raw
// estimator's expectation on the same window: E{c} = A C.
struct BiasMatrix {
  LagRange range;
  linalg::Matrix entries;
};

// E{c} = A * C_true; requires matching windows.
CovarianceFunction expected_estimate(const CovarianceFunction& c_true, const BiasMatrix& a);

// Bias-free estimate: solve A c_hat = c (no explicit inverse).
// Throws SingularMatrix if the matrix is effectively singular (rcond < 1e-12).
CovarianceFunction correct(const CovarianceFunction& c, const BiasMatrix& a);

// Holds the matrix together with its factorization for reuse across
// realizations sharing weights. Immutable; concurrent correct() calls are safe.
class BiasSolver {
 public:
  explicit BiasSolver(BiasMatrix matrix);

  const BiasMatrix& matrix() const { return matrix_; }
  double rcond() const { return factorization_.rcond(); }
  CovarianceFunction correct(const CovarianceFunction& c) const;

 private:
  BiasMatrix matrix_;
  linalg::Factorization factorization_;
};

}  // namespace unbiascov
