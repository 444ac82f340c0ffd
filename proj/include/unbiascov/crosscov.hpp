#pragma once

#include <span>

#include "unbiascov/bias.hpp"
#include "unbiascov/covariance.hpp"
#include "unbiascov/series.hpp"

namespace unbiascov {

// Two weighted series on the same time grid; lengths may differ.
struct SeriesPair {
  WeightedSeries s1;
  WeightedSeries s2;

  SeriesPair(WeightedSeries first, WeightedSeries second) : s1(std::move(first)), s2(std::move(second)) {
    if (s1.dt() != s2.dt()) throw DtMismatch("series pair: dt differs between the two series");
  }
};

namespace crosscov {

// Raw cross-covariance of two individually demeaned series,
// c_k = X_k / Y_k over -(N1-1) <= k <= N2-1.
CovarianceFunction estimate_raw(const MeanFreeSeries& s1, const MeanFreeSeries& s2,
                                const LagRange& range, SumPath path = SumPath::fft);

// Cross bias-prediction matrix,
// a_kj = delta_{k-j} + Y_j/(sw1 sw2) - G_kj/(Y_k sw2) - H_kj/(Y_k sw1).
// The auto case is the degenerate w1 = w2 instance.
BiasMatrix bias_matrix(std::span<const double> weights1, std::span<const double> weights2,
                       const LagRange& range, SumPath path = SumPath::fft);

}  // namespace crosscov
}  // namespace unbiascov
