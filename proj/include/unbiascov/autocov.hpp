#pragma once

#include <span>

#include "unbiascov/bias.hpp"
#include "unbiascov/covariance.hpp"
#include "unbiascov/series.hpp"

namespace unbiascov::autocov {

// Raw auto-covariance c_k = X_k / Y_k on the requested window. Accepts the full
// estimable window -(N-1) <= k <= N-1; correction additionally needs the strict
// invertibility window.
CovarianceFunction estimate_raw(const MeanFreeSeries& mf, const LagRange& range,
                                SumPath path = SumPath::fft);

// Bias-prediction matrix for one weight pattern,
// a_kj = delta_{k-j} + Y_j/(sum w)^2 - (G_kj + H_kj)/(Y_k sum w).
BiasMatrix bias_matrix(std::span<const double> weights, const LagRange& range,
                       SumPath path = SumPath::fft);

// epsilon_k = (A C_true)_k - C_true_k; lags of c_true outside the window count as zero.
CovarianceFunction bias_epsilon(const CovarianceFunction& c_true, std::span<const double> weights,
                                const LagRange& range, SumPath path = SumPath::fft);

struct VarianceBreakdown {
  double s2 = 0.0;            // naive variance of the mean-free data
  double sigma_mean2 = 0.0;   // mean-estimator variance from the corrected covariance
  double s2_corrected = 0.0;  // s2 + sigma_mean2
};

// Full chain: demean -> raw estimate -> bias matrix -> correction ->
// mean-estimator variance -> corrected variance.
VarianceBreakdown corrected_variance_pipeline(const WeightedSeries& series, const LagRange& range);

}  // namespace unbiascov::autocov
