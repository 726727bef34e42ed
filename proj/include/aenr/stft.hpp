// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "aenr/fft.hpp"

namespace aenr {

enum class Window { kSqrtHann, kRectangular };

Window window_from_string(const std::string& name);
std::string to_string(Window w);

// Periodic window of length n (periodic so that sqrt-Hann^2 at hop n/2 sums
// exactly to one).
std::vector<double> make_window(Window w, std::size_t n);

struct StftConfig {
  std::size_t fft_order = 512;
  std::size_t hop = 256;
  Window window = Window::kSqrtHann;
  double sample_rate = 16000.0;

  std::size_t bins() const { return fft_order / 2 + 1; }
  // Throws InvalidArgument unless fft_order is a power of two, 0 < hop <=
  // fft_order and the window pair overlap-adds to a constant at this hop.
  void validate() const;
};

// One STFT frame: K = fft_order/2 + 1 complex bins.
struct Spectrum {
  std::vector<Complex> bins;
  std::int64_t frame_index = 0;

  Spectrum() = default;
  explicit Spectrum(std::size_t k, std::int64_t frame = 0) : bins(k), frame_index(frame) {}
  std::size_t size() const { return bins.size(); }
};

// Power-law compressed magnitude and phase of a Spectrum.
struct CompressedFrame {
  std::vector<double> magnitude;
  std::vector<double> phase;  // radians in (-pi, pi]
  std::size_t size() const { return magnitude.size(); }
};

// Maps any angle into (-pi, pi].
double wrap_phase(double radians);

CompressedFrame compress(const Spectrum& spec, double alpha);
Spectrum decompress(const CompressedFrame& frame, double alpha);

// Per-stream overlap-add memory (fft_order - hop samples of pending output).
struct OverlapState {
  std::vector<double> tail;
};

// Windowed real FFT analysis and weighted overlap-add synthesis.
class Stft {
 public:
  explicit Stft(const StftConfig& cfg);

  const StftConfig& config() const { return cfg_; }
  std::size_t bins() const { return cfg_.bins(); }
  std::span<const double> window() const { return window_; }
  // Sum over frames of analysis*synthesis window at any sample.
  double cola_gain() const { return cola_gain_; }

  Spectrum analyze(std::span<const double> frame, std::int64_t frame_index = 0);

  OverlapState make_overlap_state() const;
  // Writes `hop` finished samples into out.
  void synthesize(const Spectrum& spec, OverlapState& state, std::span<double> out);

 private:
  StftConfig cfg_;
  std::vector<double> window_;
  double cola_gain_ = 1.0;
  RealFft fft_;
  std::vector<double> scratch_;
};

// Sliding analysis buffer: push one hop, get back the latest fft_order
// samples (zeros before the stream start).
class FrameBuffer {
 public:
  FrameBuffer(std::size_t frame_length, std::size_t hop);
  std::span<const double> push(std::span<const double> hop_samples);
  std::span<const double> frame() const { return frame_; }
  void reset();

 private:
  std::size_t hop_;
  std::vector<double> frame_;
};

}  // namespace aenr
