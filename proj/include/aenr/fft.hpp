// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

namespace aenr {

using Complex = std::complex<double>;

// Real-input FFT of a fixed size, backed by FFTW. Each instance owns its plan
// and scratch buffers, so it must not be shared between threads.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  // Unnormalized forward transform: out[k] = sum_n in[n] e^{-2 pi i k n / N}.
  void forward(std::span<const double> in, std::span<Complex> out);
  // Normalized inverse (includes the 1/N factor), so inverse(forward(x)) == x.
  void inverse(std::span<const Complex> in, std::span<double> out);

 private:
  struct Plans;
  std::size_t size_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace aenr
