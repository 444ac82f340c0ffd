#include "unbiascov/bias.hpp"

#include <omp.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <vector>

#include "unbiascov/autocov.hpp"
#include "unbiascov/crosscov.hpp"
#include "unbiascov/spectral.hpp"
#include "unbiascov/summation.hpp"

namespace unbiascov {

namespace detail {

// Exact denominators for the window, Y_k > 0 enforced.
std::vector<double> checked_overlap_sums(std::span<const double> w1, std::span<const double> w2,
                                         const LagRange& range) {
  std::vector<double> y = spectral::overlap_sums(w1, w2, range.k1, range.k2);
  for (int k = range.k1; k <= range.k2; ++k) {
    if (!(y[static_cast<std::size_t>(k - range.k1)] > 0.0)) throw EmptyOverlap(k);
  }
  return y;
}

CovarianceFunction estimate_raw_impl(const MeanFreeSeries& s1, const MeanFreeSeries& s2,
                                     const LagRange& range, SumPath path) {
  if (s1.values.size() != s1.weights.size() || s2.values.size() != s2.weights.size()) {
    throw LengthMismatch("estimate_raw: values/weights length mismatch");
  }
  if (s1.dt != s2.dt) throw DtMismatch("estimate_raw: dt differs between series");
  validate_estimable(range, s1.size(), s2.size());

  const std::vector<double> y = checked_overlap_sums(s1.weights, s2.weights, range);
  const spectral::CorrelationSums sums = (path == SumPath::fft)
                                             ? spectral::correlation_sums_fft(s1, s2)
                                             : spectral::correlation_sums_direct(s1, s2);
  std::vector<double> values(static_cast<std::size_t>(range.count()));
  for (int k = range.k1; k <= range.k2; ++k) {
    const auto idx = static_cast<std::size_t>(k - range.k1);
    values[idx] = sums.x.at(k) / y[idx];
  }
  return CovarianceFunction(range, std::move(values), s1.dt);
}

linalg::Matrix assemble_bias_direct(std::span<const double> w1, std::span<const double> w2,
                                    const LagRange& range, const std::vector<double>& y) {
  const int n1 = static_cast<int>(w1.size());
  const int n2 = static_cast<int>(w2.size());
  const double sw1 = compensated_sum(w1);
  const double sw2 = compensated_sum(w2);
  const int count = range.count();
  linalg::Matrix a(static_cast<std::size_t>(count));

  for (int r = 0; r < count; ++r) {
    const int k = range.k1 + r;
    const double yk = y[static_cast<std::size_t>(r)];
    for (int c = 0; c < count; ++c) {
      const int j = range.k1 + c;
      CompensatedSum t1;  // sum w1_i w2_{i+j} w2_{i+k}
      {
        const int begin = std::max({0, -j, -k});
        const int end = std::min({n1, n2 - j, n2 - k});
        for (int i = begin; i < end; ++i) {
          t1.add(w1[static_cast<std::size_t>(i)] * w2[static_cast<std::size_t>(i + j)] *
                 w2[static_cast<std::size_t>(i + k)]);
        }
      }
      CompensatedSum t2;  // sum w1_i w2_{i+j} w1_{i+j-k}
      {
        const int begin = std::max({0, -j, k - j});
        const int end = std::min({n1, n2 - j, n1 + k - j});
        for (int i = begin; i < end; ++i) {
          t2.add(w1[static_cast<std::size_t>(i)] * w2[static_cast<std::size_t>(i + j)] *
                 w1[static_cast<std::size_t>(i + j - k)]);
        }
      }
      const double yj = y[static_cast<std::size_t>(c)];
      a(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
          (k == j ? 1.0 : 0.0) + yj / (sw1 * sw2) - t1.value() / (yk * sw2) - t2.value() / (yk * sw1);
    }
  }
  return a;
}

linalg::Matrix assemble_bias_fft(std::span<const double> w1, std::span<const double> w2,
                                 const LagRange& range, const std::vector<double>& y) {
  const std::size_t n1 = w1.size();
  const std::size_t n2 = w2.size();
  const double sw1 = compensated_sum(w1);
  const double sw2 = compensated_sum(w2);
  const int count = range.count();
  linalg::Matrix a(static_cast<std::size_t>(count));

  spectral::Spectrum w1_spectrum;
  spectral::Spectrum w2_spectrum;
  {
    spectral::SpectralEngine engine(n1, n2);
    std::vector<double> pad1(n1 + n2, 0.0);
    std::vector<double> pad2(n1 + n2, 0.0);
    std::copy(w1.begin(), w1.end(), pad1.begin());
    std::copy(w2.begin(), w2.end(), pad2.begin());
    w1_spectrum = engine.spectrum(pad1);
    w2_spectrum = engine.spectrum(pad2);
  }

  // Rows are independent; each thread runs its own engine. Serialized when
  // already inside an active parallel region (Monte Carlo outer loop).
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
#pragma omp parallel
  {
    spectral::SpectralEngine engine(n1, n2);
#pragma omp for schedule(static)
    for (int r = 0; r < count; ++r) {
      if (failed.load(std::memory_order_relaxed)) continue;
      try {
        const int k = range.k1 + r;
        const spectral::GHRow row = engine.gh_row(w1_spectrum, w2_spectrum, w1, w2, k);
        const double yk = y[static_cast<std::size_t>(r)];
        for (int c = 0; c < count; ++c) {
          const int j = range.k1 + c;
          const double yj = y[static_cast<std::size_t>(c)];
          a(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) =
              (k == j ? 1.0 : 0.0) + yj / (sw1 * sw2) - row.g.at(j) / (yk * sw2) - row.h.at(j) / (yk * sw1);
        }
      } catch (...) {
#pragma omp critical(unbiascov_bias_failure)
        {
          if (!failure) failure = std::current_exception();
        }
        failed.store(true, std::memory_order_relaxed);
      }
    }
  }
  if (failure) std::rethrow_exception(failure);
  return a;
}

BiasMatrix assemble_bias(std::span<const double> w1, std::span<const double> w2, const LagRange& range,
                         SumPath path) {
  validate_invertible(range, w1.size(), w2.size());
  const std::vector<double> y = checked_overlap_sums(w1, w2, range);
  linalg::Matrix entries = (path == SumPath::fft) ? assemble_bias_fft(w1, w2, range, y)
                                                  : assemble_bias_direct(w1, w2, range, y);
  return BiasMatrix{range, std::move(entries)};
}

}  // namespace detail

CovarianceFunction expected_estimate(const CovarianceFunction& c_true, const BiasMatrix& a) {
  if (c_true.range() != a.range) throw RangeMismatch("expected_estimate: lag windows differ");
  std::vector<double> values = linalg::multiply(a.entries, c_true.values());
  return CovarianceFunction(a.range, std::move(values), c_true.dt());
}

BiasSolver::BiasSolver(BiasMatrix matrix) : matrix_(std::move(matrix)), factorization_(matrix_.entries) {
  if (factorization_.rcond() < 1e-12) {
    throw SingularMatrix("bias matrix: reciprocal condition estimate " +
                         std::to_string(factorization_.rcond()) +
                         " below 1e-12; window too wide or weights degenerate");
  }
}

CovarianceFunction BiasSolver::correct(const CovarianceFunction& c) const {
  if (c.range() != matrix_.range) throw RangeMismatch("correct: lag windows differ");
  std::vector<double> values = factorization_.solve(c.values());
  return CovarianceFunction(matrix_.range, std::move(values), c.dt());
}

CovarianceFunction correct(const CovarianceFunction& c, const BiasMatrix& a) {
  return BiasSolver(a).correct(c);
}

namespace autocov {

CovarianceFunction estimate_raw(const MeanFreeSeries& mf, const LagRange& range, SumPath path) {
  return detail::estimate_raw_impl(mf, mf, range, path);
}

BiasMatrix bias_matrix(std::span<const double> weights, const LagRange& range, SumPath path) {
  return detail::assemble_bias(weights, weights, range, path);
}

CovarianceFunction bias_epsilon(const CovarianceFunction& c_true, std::span<const double> weights,
                                const LagRange& range, SumPath path) {
  const BiasMatrix a = bias_matrix(weights, range, path);
  std::vector<double> on_range(static_cast<std::size_t>(range.count()));
  for (int k = range.k1; k <= range.k2; ++k) {
    on_range[static_cast<std::size_t>(k - range.k1)] = c_true.value_or_zero(k);
  }
  const CovarianceFunction restricted(range, std::move(on_range), c_true.dt());
  const CovarianceFunction predicted = expected_estimate(restricted, a);
  std::vector<double> eps(static_cast<std::size_t>(range.count()));
  for (int k = range.k1; k <= range.k2; ++k) {
    eps[static_cast<std::size_t>(k - range.k1)] = predicted.at(k) - restricted.at(k);
  }
  return CovarianceFunction(range, std::move(eps), c_true.dt());
}

VarianceBreakdown corrected_variance_pipeline(const WeightedSeries& series, const LagRange& range) {
  const MeanFreeSeries mf = stats::demean(series);
  const CovarianceFunction raw = estimate_raw(mf, range);
  const BiasMatrix a = bias_matrix(mf.weights, range);
  const CovarianceFunction corrected = correct(raw, a);

  VarianceBreakdown out;
  out.s2 = stats::naive_variance(mf);
  out.sigma_mean2 = stats::mean_estimator_variance(series.weights(), corrected);
  out.s2_corrected = stats::corrected_variance_correlated(out.s2, out.sigma_mean2);
  return out;
}

}  // namespace autocov

namespace crosscov {

CovarianceFunction estimate_raw(const MeanFreeSeries& s1, const MeanFreeSeries& s2,
                                const LagRange& range, SumPath path) {
  return detail::estimate_raw_impl(s1, s2, range, path);
}

BiasMatrix bias_matrix(std::span<const double> weights1, std::span<const double> weights2,
                       const LagRange& range, SumPath path) {
  return detail::assemble_bias(weights1, weights2, range, path);
}

}  // namespace crosscov

}  // namespace unbiascov
