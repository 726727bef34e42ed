// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/fft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <mutex>

#include "aenr/error.hpp"

namespace aenr {

namespace {
// FFTW's planner is not thread-safe; execution of distinct plans is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  double* time = nullptr;
  fftw_complex* freq = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;

  ~Plans() {
    std::lock_guard<std::mutex> lock(planner_mutex());
    if (fwd) fftw_destroy_plan(fwd);
    if (inv) fftw_destroy_plan(inv);
    fftw_free(time);
    fftw_free(freq);
  }
};

RealFft::RealFft(std::size_t size) : size_(size), plans_(std::make_unique<Plans>()) {
  if (size < 2 || (size & (size - 1)) != 0)
    throw InvalidArgument("RealFft: size must be a power of two >= 2");
  const int n = static_cast<int>(size);
  std::lock_guard<std::mutex> lock(planner_mutex());
  plans_->time = fftw_alloc_real(size);
  plans_->freq = fftw_alloc_complex(size / 2 + 1);
  // FFTW_ESTIMATE keeps the chosen algorithm, and therefore rounding, identical
  // from run to run.
  plans_->fwd = fftw_plan_dft_r2c_1d(n, plans_->time, plans_->freq, FFTW_ESTIMATE);
  plans_->inv = fftw_plan_dft_c2r_1d(n, plans_->freq, plans_->time, FFTW_ESTIMATE);
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<Complex> out) {
  if (in.size() != size_ || out.size() != bins())
    throw InvalidArgument("RealFft::forward: buffer size mismatch");
  std::copy(in.begin(), in.end(), plans_->time);
  fftw_execute(plans_->fwd);
  for (std::size_t k = 0; k < bins(); ++k)
    out[k] = Complex(plans_->freq[k][0], plans_->freq[k][1]);
}

void RealFft::inverse(std::span<const Complex> in, std::span<double> out) {
  if (in.size() != bins() || out.size() != size_)
    throw InvalidArgument("RealFft::inverse: buffer size mismatch");
  for (std::size_t k = 0; k < bins(); ++k) {
    plans_->freq[k][0] = in[k].real();
    plans_->freq[k][1] = in[k].imag();
  }
  // c2r ignores the imaginary parts of DC and Nyquist.
  fftw_execute(plans_->inv);
  const double scale = 1.0 / static_cast<double>(size_);
  for (std::size_t n = 0; n < size_; ++n) out[n] = plans_->time[n] * scale;
}

}  // namespace aenr
