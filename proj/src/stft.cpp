// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "aenr/error.hpp"

namespace aenr {

Window window_from_string(const std::string& name) {
  if (name == "sqrt_hann") return Window::kSqrtHann;
  if (name == "rectangular" || name == "rect") return Window::kRectangular;
  throw InvalidArgument("unknown window '" + name + "'");
}

std::string to_string(Window w) {
  return w == Window::kSqrtHann ? "sqrt_hann" : "rectangular";
}

std::vector<double> make_window(Window w, std::size_t n) {
  std::vector<double> out(n, 1.0);
  if (w == Window::kSqrtHann) {
    for (std::size_t i = 0; i < n; ++i) {
      const double hann =
          0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n));
      out[i] = std::sqrt(hann);
    }
  }
  return out;
}

namespace {

// Returns the constant overlap-add gain of window^2 at the given hop, or a
// negative value if the sum is not constant.
double cola_constant(std::span<const double> win, std::size_t hop) {
  const std::size_t n = win.size();
  double first = 0.0;
  for (std::size_t i = 0; i < hop; ++i) {
    double acc = 0.0;
    for (std::size_t j = i; j < n; j += hop) acc += win[j] * win[j];
    if (i == 0) {
      first = acc;
    } else if (std::abs(acc - first) > 1e-9 * std::max(1.0, first)) {
      return -1.0;
    }
  }
  return first;
}

}  // namespace

void StftConfig::validate() const {
  if (fft_order < 2 || (fft_order & (fft_order - 1)) != 0)
    throw InvalidArgument("stft: fft_order must be a power of two");
  if (hop == 0 || hop > fft_order) throw InvalidArgument("stft: hop must be in (0, fft_order]");
  if (!(sample_rate > 0.0)) throw InvalidArgument("stft: sample_rate must be positive");
  const auto win = make_window(window, fft_order);
  if (cola_constant(win, hop) <= 0.0)
    throw InvalidArgument("stft: window does not overlap-add to a constant at hop " +
                          std::to_string(hop));
}

double wrap_phase(double radians) {
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  double r = std::remainder(radians, kTwoPi);  // [-pi, pi]
  if (r <= -std::numbers::pi) r += kTwoPi;
  return r;
}

static void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("compression alpha must be in (0, 1]");
}

CompressedFrame compress(const Spectrum& spec, double alpha) {
  check_alpha(alpha);
  CompressedFrame out;
  out.magnitude.resize(spec.size());
  out.phase.resize(spec.size());
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double mag = std::abs(spec.bins[k]);
    out.magnitude[k] = std::pow(mag, alpha);
    out.phase[k] = mag > 0.0 ? wrap_phase(std::arg(spec.bins[k])) : 0.0;
  }
  return out;
}

Spectrum decompress(const CompressedFrame& frame, double alpha) {
  check_alpha(alpha);
  if (frame.phase.size() != frame.magnitude.size())
    throw InvalidArgument("decompress: magnitude/phase length mismatch");
  Spectrum out(frame.size());
  const double inv = 1.0 / alpha;
  for (std::size_t k = 0; k < frame.size(); ++k)
    out.bins[k] = std::polar(std::pow(frame.magnitude[k], inv), frame.phase[k]);
  return out;
}

Stft::Stft(const StftConfig& cfg) : cfg_(cfg), fft_(cfg.fft_order) {
  cfg_.validate();
  window_ = make_window(cfg_.window, cfg_.fft_order);
  cola_gain_ = cola_constant(window_, cfg_.hop);
  scratch_.resize(cfg_.fft_order);
}

Spectrum Stft::analyze(std::span<const double> frame, std::int64_t frame_index) {
  if (frame.size() != cfg_.fft_order)
    throw InvalidArgument("analyze: frame length " + std::to_string(frame.size()) +
                          " != fft_order " + std::to_string(cfg_.fft_order));
  for (std::size_t n = 0; n < frame.size(); ++n) scratch_[n] = frame[n] * window_[n];
  Spectrum out(bins(), frame_index);
  fft_.forward(scratch_, out.bins);
  out.bins.front().imag(0.0);
  out.bins.back().imag(0.0);
  return out;
}

OverlapState Stft::make_overlap_state() const {
  return OverlapState{std::vector<double>(cfg_.fft_order - cfg_.hop, 0.0)};
}

void Stft::synthesize(const Spectrum& spec, OverlapState& state, std::span<double> out) {
  const std::size_t n = cfg_.fft_order;
  const std::size_t hop = cfg_.hop;
  if (spec.size() != bins()) throw InvalidArgument("synthesize: spectrum has wrong bin count");
  if (out.size() != hop) throw InvalidArgument("synthesize: output must hold exactly one hop");
  if (state.tail.size() != n - hop) state.tail.assign(n - hop, 0.0);

  fft_.inverse(spec.bins, scratch_);
  const double g = 1.0 / cola_gain_;
  for (std::size_t i = 0; i < n; ++i) scratch_[i] *= window_[i] * g;

  const std::size_t overlap = n - hop;
  for (std::size_t i = 0; i < hop; ++i) out[i] = scratch_[i] + (i < overlap ? state.tail[i] : 0.0);
  // Shift remaining pending output forward by one hop, then add this frame's tail.
  std::vector<double>& tail = state.tail;
  for (std::size_t i = 0; i < overlap; ++i) {
    const double pending = (i + hop < overlap) ? tail[i + hop] : 0.0;
    tail[i] = pending + scratch_[i + hop];
  }
}

FrameBuffer::FrameBuffer(std::size_t frame_length, std::size_t hop)
    : hop_(hop), frame_(frame_length, 0.0) {
  if (hop == 0 || hop > frame_length) throw InvalidArgument("FrameBuffer: hop must be in (0, frame_length]");
}

std::span<const double> FrameBuffer::push(std::span<const double> hop_samples) {
  if (hop_samples.size() != hop_) throw InvalidArgument("FrameBuffer: expected one hop of samples");
  std::shift_left(frame_.begin(), frame_.end(), static_cast<std::ptrdiff_t>(hop_));
  std::copy(hop_samples.begin(), hop_samples.end(), frame_.end() - static_cast<std::ptrdiff_t>(hop_));
  return frame_;
}

void FrameBuffer::reset() { std::fill(frame_.begin(), frame_.end(), 0.0); }

}  // namespace aenr
