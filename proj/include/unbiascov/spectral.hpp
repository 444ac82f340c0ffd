#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "unbiascov/errors.hpp"
#include "unbiascov/fft.hpp"
#include "unbiascov/series.hpp"

namespace unbiascov::spectral {

using Spectrum = std::vector<std::complex<double>>;

// Bijection between lags and transform bins for sequences of lengths n1, n2
// padded to L = n1 + n2: lag k >= 0 sits at bin k, lag k < 0 at bin L + k.
// Valid lags are -(n1-1) <= k <= n2-1; bin n2 maps to no lag.
std::size_t lag_to_bin(int k, std::size_t n1, std::size_t n2);

// Length-L array addressed by lag through lag_to_bin.
struct LagIndexedArray {
  std::vector<double> bins;  // length n1 + n2
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  int min_lag() const { return -(static_cast<int>(n1) - 1); }
  int max_lag() const { return static_cast<int>(n2) - 1; }
  double at(int k) const { return bins[lag_to_bin(k, n1, n2)]; }
  double& at(int k) { return bins[lag_to_bin(k, n1, n2)]; }

  static LagIndexedArray zeros(std::size_t n1, std::size_t n2) {
    return LagIndexedArray{std::vector<double>(n1 + n2, 0.0), n1, n2};
  }
};

// Two sequences zero-padded to the common transform length L = n1 + n2.
struct PaddedPair {
  std::vector<double> a;  // first sequence, zeros from index n1
  std::vector<double> b;  // second sequence, zeros from index n2
  std::size_t n1 = 0;
  std::size_t n2 = 0;

  std::size_t transform_length() const { return n1 + n2; }
};

PaddedPair zero_padded(std::span<const double> first, std::span<const double> second);

struct CorrelationSums {
  LagIndexedArray x;  // weighted value products per lag
  LagIndexedArray y;  // weight products per lag
};

// Row k of the G/H matrices: g holds G_{k,j}, h holds H_{k,j} over column lags j.
struct GHRow {
  LagIndexedArray g;
  LagIndexedArray h;
  int row_lag = 0;
};

// O(N1*N2) reference implementation of the correlation sums
// X_k = sum_i w1_i w2_{i+k} x1_i x2_{i+k} and Y_k without the value factors.
// Pass the same series twice for the auto case.
CorrelationSums correlation_sums_direct(const MeanFreeSeries& s1, const MeanFreeSeries& s2);
CorrelationSums correlation_sums_direct(std::span<const double> x1, std::span<const double> w1,
                                        std::span<const double> x2, std::span<const double> w2);

// FFT evaluation of the same sums and of the bias-matrix row transforms.
// One engine serves one (n1, n2) geometry; create one per thread for
// concurrent use.
class SpectralEngine {
 public:
  SpectralEngine(std::size_t n1, std::size_t n2);

  std::size_t n1() const { return n1_; }
  std::size_t n2() const { return n2_; }
  std::size_t transform_length() const { return n1_ + n2_; }

  // Forward DFT of a length-L padded sequence.
  Spectrum spectrum(std::span<const double> padded);

  // IFFT{conj(A) * B}; the lag-m bin holds sum_i a_i b_{i+m}. Throws
  // NumericalResidue if the imaginary part survives beyond roundoff.
  LagIndexedArray correlate(const Spectrum& a, const Spectrum& b);

  // X = IFFT{FFT{w1*x1}^* FFT{w2*x2}}, Y = IFFT{FFT{w1}^* FFT{w2}}.
  CorrelationSums correlation_sums_fft(const PaddedPair& weighted_values, const PaddedPair& weights);

  // G_k = IFFT{FFT{w1 .* shift(w2, +k)}^* FFT{w2}},
  // H_k = IFFT{FFT{w1}^* FFT{w2 .* shift(w1, -k)}}, shift(w, k)[i] = w[i+k].
  GHRow gh_row(std::span<const double> w1, std::span<const double> w2, int k);

  // Same with precomputed weight spectra (row loops reuse them).
  GHRow gh_row(const Spectrum& w1_spectrum, const Spectrum& w2_spectrum,
               std::span<const double> w1, std::span<const double> w2, int k);

 private:
  std::size_t n1_;
  std::size_t n2_;
  Fft fft_;
};

// One-shot conveniences building the padding and engine internally.
CorrelationSums correlation_sums_fft(const MeanFreeSeries& s1, const MeanFreeSeries& s2);
GHRow gh_row(std::span<const double> w1, std::span<const double> w2, int k);

// Exact overlap sums Y_k on a lag range via direct summation. Division sites use
// these: an FFT-evaluated Y cannot represent an exactly empty overlap.
std::vector<double> overlap_sums(std::span<const double> w1, std::span<const double> w2, int k1, int k2);

}  // namespace unbiascov::spectral
