#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "unbiascov/errors.hpp"

namespace unbiascov {

// Integer lag window [k1, k2].
struct LagRange {
  int k1 = 0;
  int k2 = 0;

  LagRange() = default;
  LagRange(int lo, int hi) : k1(lo), k2(hi) {
    if (k1 > k2) throw InvalidRange("lag range: k1 > k2");
  }

  int count() const { return k2 - k1 + 1; }
  bool contains(int k) const { return k >= k1 && k <= k2; }
  bool operator==(const LagRange&) const = default;
};

// Raw estimation window: lags with any overlap at all, -(n1-1) <= k <= n2-1.
void validate_estimable(const LagRange& range, std::size_t n1, std::size_t n2);

// Invertibility window (strict): -(n1-1) < k1 <= k2 < n2-1. At the full window the
// bias matrix is rank deficient and no correction exists.
void validate_invertible(const LagRange& range, std::size_t n1, std::size_t n2);

// Lag-indexed covariance values. Lag time of index k is k*dt.
class CovarianceFunction {
 public:
  CovarianceFunction() = default;
  CovarianceFunction(LagRange range, std::vector<double> values, double dt = 1.0);

  static CovarianceFunction zeros(LagRange range, double dt = 1.0);

  const LagRange& range() const { return range_; }
  int k1() const { return range_.k1; }
  int k2() const { return range_.k2; }
  double dt() const { return dt_; }
  std::size_t size() const { return values_.size(); }

  double at(int k) const {
    if (!range_.contains(k)) throw LagOutOfRange(k);
    return values_[static_cast<std::size_t>(k - range_.k1)];
  }
  double& at(int k) {
    if (!range_.contains(k)) throw LagOutOfRange(k);
    return values_[static_cast<std::size_t>(k - range_.k1)];
  }
  double value_or_zero(int k) const {
    return range_.contains(k) ? values_[static_cast<std::size_t>(k - range_.k1)] : 0.0;
  }
  double lag_time(int k) const { return static_cast<double>(k) * dt_; }

  std::span<const double> values() const { return values_; }

 private:
  LagRange range_{};
  std::vector<double> values_;
  double dt_ = 1.0;
};

}  // namespace unbiascov
