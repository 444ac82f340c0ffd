#include "unbiascov/series.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "unbiascov/summation.hpp"

namespace unbiascov {

WeightedSeries::WeightedSeries(std::vector<double> values, std::vector<double> weights, double dt)
    : values_(std::move(values)), weights_(std::move(weights)), dt_(dt) {
  if (values_.size() != weights_.size()) {
    throw LengthMismatch("weighted series: " + std::to_string(values_.size()) + " values vs " +
                         std::to_string(weights_.size()) + " weights");
  }
  if (values_.size() < 2) throw InvalidData("weighted series: need at least two samples");
  if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw InvalidData("weighted series: dt must be positive");
  std::size_t positive = 0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) throw InvalidData("weighted series: nonfinite value");
    if (!std::isfinite(weights_[i]) || weights_[i] < 0.0) {
      throw InvalidData("weighted series: weights must be finite and >= 0");
    }
    if (weights_[i] > 0.0) ++positive;
  }
  if (positive < 2) throw DegenerateWeights("weighted series: fewer than two positive weights");
}

namespace stats {

double weighted_mean(std::span<const double> values, std::span<const double> weights) {
  if (values.size() != weights.size()) throw LengthMismatch("weighted_mean: length mismatch");
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = 0; i < values.size(); ++i) {
    num.add(weights[i] * values[i]);
    den.add(weights[i]);
  }
  const double w = den.value();
  if (w == 0.0) throw AllWeightsZero();
  return num.value() / w;
}

double weighted_mean(const WeightedSeries& series) {
  return weighted_mean(series.values(), series.weights());
}

MeanFreeSeries demean(const WeightedSeries& series) {
  MeanFreeSeries mf;
  mf.mean_estimate = weighted_mean(series);
  mf.weights = series.weights();
  mf.dt = series.dt();
  mf.values.resize(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    mf.values[i] = series.values()[i] - mf.mean_estimate;
  }
  return mf;
}

double naive_variance(const MeanFreeSeries& mf) {
  if (mf.values.size() != mf.weights.size()) throw LengthMismatch("naive_variance: length mismatch");
  CompensatedSum num;
  CompensatedSum den;
  for (std::size_t i = 0; i < mf.values.size(); ++i) {
    num.add(mf.weights[i] * mf.values[i] * mf.values[i]);
    den.add(mf.weights[i]);
  }
  const double w = den.value();
  if (w == 0.0) throw AllWeightsZero();
  return num.value() / w;
}

double bessel_variance_independent(const MeanFreeSeries& mf) {
  if (mf.values.size() != mf.weights.size()) {
    throw LengthMismatch("bessel_variance_independent: length mismatch");
  }
  CompensatedSum wsum;
  CompensatedSum w2sum;
  CompensatedSum wx2;
  for (std::size_t i = 0; i < mf.values.size(); ++i) {
    wsum.add(mf.weights[i]);
    w2sum.add(mf.weights[i] * mf.weights[i]);
    wx2.add(mf.weights[i] * mf.values[i] * mf.values[i]);
  }
  const double sw = wsum.value();
  const double denom = sw * sw - w2sum.value();
  if (!(denom > 0.0)) {
    throw DegenerateWeights("bessel_variance_independent: effective sample size <= 1");
  }
  return sw / denom * wx2.value();
}

double mean_estimator_variance(std::span<const double> weights, const CovarianceFunction& cov) {
  const int n = static_cast<int>(weights.size());
  CompensatedSum den;
  for (double w : weights) den.add(w);
  const double sw = den.value();
  if (sw == 0.0) throw AllWeightsZero();

  // Group the double sum by lag k = j - i: sum_k C_k * sum_i w_i w_{i+k}.
  const int klo = std::max(cov.k1(), -(n - 1));
  const int khi = std::min(cov.k2(), n - 1);
  CompensatedSum total;
  for (int k = klo; k <= khi; ++k) {
    const int begin = std::max(0, -k);
    const int end = std::min(n, n - k);
    CompensatedSum overlap;
    for (int i = begin; i < end; ++i) {
      overlap.add(weights[static_cast<std::size_t>(i)] * weights[static_cast<std::size_t>(i + k)]);
    }
    total.add(overlap.value() * cov.at(k));
  }
  return total.value() / (sw * sw);
}

double corrected_variance_correlated(double s2, double sigma_mean2) {
  return s2 + sigma_mean2;
}

}  // namespace stats
}  // namespace unbiascov
