#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace unbiascov::spectral {

// Complex-to-complex DFT of one fixed length (arbitrary, not just powers of two).
// Each instance owns its plans and buffers, so distinct instances may execute
// concurrently; plan construction itself is serialized internally.
class Fft {
 public:
  explicit Fft(std::size_t n);
  ~Fft();

  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t size() const;

  // Forward DFT of a real sequence (sign convention e^{-2*pi*i*f*t/n}).
  // The returned reference stays valid until the next call on this instance.
  const std::vector<std::complex<double>>& forward(std::span<const double> input);

  // Inverse DFT including the 1/n normalization.
  const std::vector<std::complex<double>>& inverse(std::span<const std::complex<double>> input);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace unbiascov::spectral
