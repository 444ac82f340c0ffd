#include "unbiascov/spectral.hpp"

#include <algorithm>
#include <cmath>

#include "unbiascov/summation.hpp"

namespace unbiascov::spectral {

namespace {

constexpr double kResidueTolerance = 1e-9;

// p[i] = a[i] * b[i + k] on the padded grid, zero where either factor is missing.
std::vector<double> shifted_product(std::span<const double> a, std::span<const double> b, int k,
                                    std::size_t padded_length) {
  std::vector<double> p(padded_length, 0.0);
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  const int begin = std::max(0, -k);
  const int end = std::min(na, nb - k);
  for (int i = begin; i < end; ++i) {
    p[static_cast<std::size_t>(i)] = a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(i + k)];
  }
  return p;
}

std::vector<double> padded(std::span<const double> v, std::size_t length) {
  std::vector<double> out(length, 0.0);
  std::copy(v.begin(), v.end(), out.begin());
  return out;
}

}  // namespace

std::size_t lag_to_bin(int k, std::size_t n1, std::size_t n2) {
  const int lo = -(static_cast<int>(n1) - 1);
  const int hi = static_cast<int>(n2) - 1;
  if (k < lo || k > hi) throw LagOutOfRange(k);
  return k >= 0 ? static_cast<std::size_t>(k) : static_cast<std::size_t>(static_cast<int>(n1 + n2) + k);
}

PaddedPair zero_padded(std::span<const double> first, std::span<const double> second) {
  PaddedPair pair;
  pair.n1 = first.size();
  pair.n2 = second.size();
  const std::size_t length = pair.transform_length();
  pair.a = padded(first, length);
  pair.b = padded(second, length);
  return pair;
}

CorrelationSums correlation_sums_direct(std::span<const double> x1, std::span<const double> w1,
                                        std::span<const double> x2, std::span<const double> w2) {
  if (x1.size() != w1.size() || x2.size() != w2.size()) {
    throw LengthMismatch("correlation_sums_direct: values/weights length mismatch");
  }
  const std::size_t n1 = x1.size();
  const std::size_t n2 = x2.size();
  CorrelationSums sums{LagIndexedArray::zeros(n1, n2), LagIndexedArray::zeros(n1, n2)};
  const int in1 = static_cast<int>(n1);
  const int in2 = static_cast<int>(n2);
  for (int k = -(in1 - 1); k <= in2 - 1; ++k) {
    const int begin = std::max(0, -k);
    const int end = std::min(in1, in2 - k);
    CompensatedSum x;
    CompensatedSum y;
    for (int i = begin; i < end; ++i) {
      const auto a = static_cast<std::size_t>(i);
      const auto b = static_cast<std::size_t>(i + k);
      // Grouped so the auto case is bitwise symmetric in +-k.
      const double ww = w1[a] * w2[b];
      x.add(ww * (x1[a] * x2[b]));
      y.add(ww);
    }
    sums.x.at(k) = x.value();
    sums.y.at(k) = y.value();
  }
  return sums;
}

CorrelationSums correlation_sums_direct(const MeanFreeSeries& s1, const MeanFreeSeries& s2) {
  return correlation_sums_direct(s1.values, s1.weights, s2.values, s2.weights);
}

SpectralEngine::SpectralEngine(std::size_t n1, std::size_t n2) : n1_(n1), n2_(n2), fft_(n1 + n2) {
  if (n1 == 0 || n2 == 0) throw InvalidData("spectral engine: empty sequence");
}

Spectrum SpectralEngine::spectrum(std::span<const double> padded_sequence) {
  if (padded_sequence.size() != transform_length()) {
    throw LengthMismatch("spectrum: padded length does not match engine geometry");
  }
  return fft_.forward(padded_sequence);
}

LagIndexedArray SpectralEngine::correlate(const Spectrum& a, const Spectrum& b) {
  const std::size_t length = transform_length();
  if (a.size() != length || b.size() != length) {
    throw LengthMismatch("correlate: spectrum length mismatch");
  }
  std::vector<std::complex<double>> product(length);
  for (std::size_t f = 0; f < length; ++f) product[f] = std::conj(a[f]) * b[f];
  const auto& inv = fft_.inverse(product);

  LagIndexedArray out = LagIndexedArray::zeros(n1_, n2_);
  double max_real = 0.0;
  double max_imag = 0.0;
  for (std::size_t i = 0; i < length; ++i) {
    out.bins[i] = inv[i].real();
    max_real = std::max(max_real, std::abs(inv[i].real()));
    max_imag = std::max(max_imag, std::abs(inv[i].imag()));
  }
  if (max_imag > kResidueTolerance * std::max(max_real, 1e-300)) {
    throw NumericalResidue("correlate: imaginary residue " + std::to_string(max_imag) +
                           " exceeds tolerance at scale " + std::to_string(max_real));
  }
  return out;
}

CorrelationSums SpectralEngine::correlation_sums_fft(const PaddedPair& weighted_values,
                                                     const PaddedPair& weights) {
  if (weighted_values.n1 != n1_ || weighted_values.n2 != n2_ || weights.n1 != n1_ || weights.n2 != n2_) {
    throw LengthMismatch("correlation_sums_fft: pair geometry does not match engine");
  }
  const Spectrum va = spectrum(weighted_values.a);
  const Spectrum vb = spectrum(weighted_values.b);
  LagIndexedArray x = correlate(va, vb);
  const Spectrum wa = spectrum(weights.a);
  const Spectrum wb = spectrum(weights.b);
  LagIndexedArray y = correlate(wa, wb);
  return CorrelationSums{std::move(x), std::move(y)};
}

GHRow SpectralEngine::gh_row(const Spectrum& w1_spectrum, const Spectrum& w2_spectrum,
                             std::span<const double> w1, std::span<const double> w2, int k) {
  if (w1.size() != n1_ || w2.size() != n2_) {
    throw LengthMismatch("gh_row: weight lengths do not match engine geometry");
  }
  const int lo = -(static_cast<int>(n1_) - 1);
  const int hi = static_cast<int>(n2_) - 1;
  if (k < lo || k > hi) throw LagOutOfRange(k);

  const std::size_t length = transform_length();
  // G row: correlate w1 .* shift(w2, +k) against w2.
  const std::vector<double> p = shifted_product(w1, w2, k, length);
  LagIndexedArray g = correlate(spectrum(p), w2_spectrum);
  // H row: correlate w1 against w2 .* shift(w1, -k).
  const std::vector<double> q = shifted_product(w2, w1, -k, length);
  LagIndexedArray h = correlate(w1_spectrum, spectrum(q));
  return GHRow{std::move(g), std::move(h), k};
}

GHRow SpectralEngine::gh_row(std::span<const double> w1, std::span<const double> w2, int k) {
  const Spectrum ws1 = spectrum(padded(w1, transform_length()));
  const Spectrum ws2 = spectrum(padded(w2, transform_length()));
  return gh_row(ws1, ws2, w1, w2, k);
}

CorrelationSums correlation_sums_fft(const MeanFreeSeries& s1, const MeanFreeSeries& s2) {
  if (s1.values.size() != s1.weights.size() || s2.values.size() != s2.weights.size()) {
    throw LengthMismatch("correlation_sums_fft: values/weights length mismatch");
  }
  std::vector<double> wx1(s1.size());
  std::vector<double> wx2(s2.size());
  for (std::size_t i = 0; i < s1.size(); ++i) wx1[i] = s1.weights[i] * s1.values[i];
  for (std::size_t i = 0; i < s2.size(); ++i) wx2[i] = s2.weights[i] * s2.values[i];
  SpectralEngine engine(s1.size(), s2.size());
  return engine.correlation_sums_fft(zero_padded(wx1, wx2), zero_padded(s1.weights, s2.weights));
}

GHRow gh_row(std::span<const double> w1, std::span<const double> w2, int k) {
  SpectralEngine engine(w1.size(), w2.size());
  return engine.gh_row(w1, w2, k);
}

std::vector<double> overlap_sums(std::span<const double> w1, std::span<const double> w2, int k1, int k2) {
  if (k1 > k2) throw InvalidRange("overlap_sums: k1 > k2");
  const int n1 = static_cast<int>(w1.size());
  const int n2 = static_cast<int>(w2.size());
  std::vector<double> y(static_cast<std::size_t>(k2 - k1 + 1), 0.0);
  for (int k = k1; k <= k2; ++k) {
    const int begin = std::max(0, -k);
    const int end = std::min(n1, n2 - k);
    CompensatedSum sum;
    for (int i = begin; i < end; ++i) {
      sum.add(w1[static_cast<std::size_t>(i)] * w2[static_cast<std::size_t>(i + k)]);
    }
    y[static_cast<std::size_t>(k - k1)] = sum.value();
  }
  return y;
}

}  // namespace unbiascov::spectral
