#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "unbiascov/covariance.hpp"
#include "unbiascov/errors.hpp"

namespace unbiascov {

// Equidistantly sampled values with per-sample nonnegative weights.
// A zero weight masks its sample; at least two weights must be positive.
class WeightedSeries {
 public:
  WeightedSeries(std::vector<double> values, std::vector<double> weights, double dt = 1.0);

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& weights() const { return weights_; }
  double dt() const { return dt_; }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<double> values_;
  std::vector<double> weights_;
  double dt_ = 1.0;
};

// Samples after subtracting the weighted mean estimate.
struct MeanFreeSeries {
  std::vector<double> values;   // x_i - mean_estimate
  std::vector<double> weights;  // copied from the source series
  double mean_estimate = 0.0;
  double dt = 1.0;

  std::size_t size() const { return values.size(); }
};

namespace stats {

double weighted_mean(std::span<const double> values, std::span<const double> weights);
double weighted_mean(const WeightedSeries& series);

MeanFreeSeries demean(const WeightedSeries& series);

// s^2 = sum(w x~^2) / sum(w). Biased low for data with an estimated mean.
double naive_variance(const MeanFreeSeries& mf);

// Weighted Bessel correction for independent samples:
// s^2_hat = sum(w) / ((sum w)^2 - sum w^2) * sum(w x~^2).
// Equals sum(x~^2)/(N-1) for all-equal weights.
double bessel_variance_independent(const MeanFreeSeries& mf);

// Variance of the weighted mean estimator given a covariance function:
// sigma^2 = sum_i sum_j w_i w_j C_{j-i} / (sum w)^2, grouped by lag (O(N*K)).
// Lags outside cov's range contribute zero.
double mean_estimator_variance(std::span<const double> weights, const CovarianceFunction& cov);

// s^2_hat = s^2 + sigma_mean^2 for correlated data.
double corrected_variance_correlated(double s2, double sigma_mean2);

}  // namespace stats
}  // namespace unbiascov
