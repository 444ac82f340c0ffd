#include "unbiascov/covariance.hpp"

#include <cmath>
#include <string>

namespace unbiascov {

void validate_estimable(const LagRange& range, std::size_t n1, std::size_t n2) {
  const int lo = -(static_cast<int>(n1) - 1);
  const int hi = static_cast<int>(n2) - 1;
  if (range.k1 < lo || range.k2 > hi) {
    throw InvalidRange("lag range [" + std::to_string(range.k1) + ", " + std::to_string(range.k2) +
                       "] exceeds the estimable window [" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "]");
  }
}

void validate_invertible(const LagRange& range, std::size_t n1, std::size_t n2) {
  const int lo = -(static_cast<int>(n1) - 1);
  const int hi = static_cast<int>(n2) - 1;
  if (range.k1 <= lo || range.k2 >= hi) {
    throw InvalidRange("lag range [" + std::to_string(range.k1) + ", " + std::to_string(range.k2) +
                       "] is not strictly inside (" + std::to_string(lo) + ", " +
                       std::to_string(hi) + "); the bias matrix is not invertible");
  }
}

CovarianceFunction::CovarianceFunction(LagRange range, std::vector<double> values, double dt)
    : range_(range), values_(std::move(values)), dt_(dt) {
  if (values_.size() != static_cast<std::size_t>(range_.count())) {
    throw LengthMismatch("covariance function: " + std::to_string(values_.size()) +
                         " values for " + std::to_string(range_.count()) + " lags");
  }
  if (!(dt_ > 0.0)) throw InvalidData("covariance function: dt must be positive");
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidData("covariance function: nonfinite value");
  }
}

CovarianceFunction CovarianceFunction::zeros(LagRange range, double dt) {
  return CovarianceFunction(range, std::vector<double>(static_cast<std::size_t>(range.count()), 0.0), dt);
}

}  // namespace unbiascov
