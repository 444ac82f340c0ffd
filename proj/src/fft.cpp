#include "unbiascov/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace unbiascov::spectral {

namespace {
// The FFTW planner is not thread safe; executing distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct Fft::Impl {
  std::size_t n = 0;
  std::vector<std::complex<double>> in;
  std::vector<std::complex<double>> out;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  explicit Impl(std::size_t size) : n(size), in(size), out(size) {
    if (size == 0) throw std::invalid_argument("Fft: zero length");
    auto* in_ptr = reinterpret_cast<fftw_complex*>(in.data());
    auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
    std::lock_guard<std::mutex> lock(planner_mutex());
    forward = fftw_plan_dft_1d(static_cast<int>(size), in_ptr, out_ptr, FFTW_FORWARD, FFTW_ESTIMATE);
    backward = fftw_plan_dft_1d(static_cast<int>(size), in_ptr, out_ptr, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward == nullptr || backward == nullptr) throw std::runtime_error("Fft: planning failed");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (forward != nullptr) fftw_destroy_plan(forward);
    if (backward != nullptr) fftw_destroy_plan(backward);
  }
};

Fft::Fft(std::size_t n) : impl_(std::make_unique<Impl>(n)) {}
Fft::~Fft() = default;

std::size_t Fft::size() const { return impl_->n; }

const std::vector<std::complex<double>>& Fft::forward(std::span<const double> input) {
  if (input.size() != impl_->n) throw std::invalid_argument("Fft::forward: length mismatch");
  for (std::size_t i = 0; i < impl_->n; ++i) impl_->in[i] = input[i];
  fftw_execute(impl_->forward);
  return impl_->out;
}

const std::vector<std::complex<double>>& Fft::inverse(std::span<const std::complex<double>> input) {
  if (input.size() != impl_->n) throw std::invalid_argument("Fft::inverse: length mismatch");
  for (std::size_t i = 0; i < impl_->n; ++i) impl_->in[i] = input[i];
  fftw_execute(impl_->backward);
  const double scale = 1.0 / static_cast<double>(impl_->n);
  for (auto& v : impl_->out) v *= scale;
  return impl_->out;
}

}  // namespace unbiascov::spectral
