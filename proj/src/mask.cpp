// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/mask.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aenr/error.hpp"

namespace aenr {

void sanitize(ComplexMask& mask, double ceiling) {
  for (auto& m : mask.magnitude) m = std::isfinite(m) ? std::clamp(m, 0.0, ceiling) : 0.0;
  for (auto& p : mask.phase) p = std::isfinite(p) ? wrap_phase(p) : 0.0;
}

CompressedFrame apply_mask(const CompressedFrame& z_frame, const ComplexMask& mask) {
  const std::size_t K = z_frame.size();
  if (mask.magnitude.size() != K || mask.phase.size() != K || z_frame.phase.size() != K)
    throw InvalidArgument("apply_mask: frame and mask lengths differ");
  CompressedFrame out;
  out.magnitude.resize(K);
  out.phase.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    out.magnitude[k] = z_frame.magnitude[k] * mask.magnitude[k];
    out.phase[k] = wrap_phase(z_frame.phase[k] + mask.phase[k]);
  }
  return out;
}

ComplexMask oracle_mask(const Spectrum& clean, const Spectrum& error, double alpha, const MaskConfig& cfg) {
  const std::size_t K = error.size();
  if (clean.size() != K) throw InvalidArgument("oracle_mask: spectra lengths differ");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("oracle_mask: alpha must be in (0, 1]");
  ComplexMask m = ComplexMask::constant(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double z = std::abs(error.bins[k]);
    if (z < cfg.silence_floor) continue;
    const double s = std::abs(clean.bins[k]);
    m.magnitude[k] = std::min(cfg.ceiling, std::pow(s / z, alpha));
    m.phase[k] = s > 0.0 ? wrap_phase(std::arg(clean.bins[k]) - std::arg(error.bins[k])) : 0.0;
  }
  return m;
}

ComplexMask wiener_mask(const Spectrum& error, std::span<const double> noise_psd,
                        std::span<const double> echo_psd, const MaskConfig& cfg) {
  const std::size_t K = error.size();
  if (noise_psd.size() != K || echo_psd.size() != K) throw InvalidArgument("wiener_mask: PSD length mismatch");
  ComplexMask m = ComplexMask::constant(K, 1.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double interference = std::max(0.0, noise_psd[k]) + std::max(0.0, echo_psd[k]);
    const double speech = std::max(0.0, std::norm(error.bins[k]) - interference);
    const double total = speech + interference;
    const double g = total > 0.0 ? speech / total : 1.0;
    m.magnitude[k] = std::clamp(g, cfg.gain_floor, cfg.ceiling);
  }
  return m;
}

OracleEstimator::OracleEstimator(std::vector<double> near_end, const StftConfig& stft, double alpha,
                                 const MaskConfig& cfg)
    : near_(std::move(near_end)), stft_(stft), frame_(stft.fft_order, stft.hop), alpha_(alpha), cfg_(cfg) {}

ComplexMask OracleEstimator::step(const EstimatorInput& in) {
  const std::size_t hop = stft_.config().hop;
  std::vector<double> chunk(hop, 0.0);
  for (std::size_t i = 0; i < hop && cursor_ + i < near_.size(); ++i) chunk[i] = near_[cursor_ + i];
  cursor_ += hop;
  const Spectrum clean = stft_.analyze(frame_.push(chunk), in.error.frame_index);
  ComplexMask m = oracle_mask(clean, in.error, alpha_, cfg_);
  last_clipped_ = static_cast<std::size_t>(
      std::count_if(m.magnitude.begin(), m.magnitude.end(), [&](double v) { return v >= cfg_.ceiling; }));
  return m;
}

void OracleEstimator::reset() {
  cursor_ = 0;
  frame_.reset();
}

WienerEstimator::WienerEstimator(std::size_t bins, const MaskConfig& mask_cfg, const WienerConfig& cfg)
    : bins_(bins),
      mask_cfg_(mask_cfg),
      cfg_(cfg),
      sub_length_(std::max<std::size_t>(1, cfg.noise_window / kSubwindows)),
      smoothed_(bins),
      running_min_(bins, std::numeric_limits<double>::infinity()),
      floor_(bins),
      noise_(bins),
      echo_(bins) {}

ComplexMask WienerEstimator::step(const EstimatorInput& in) {
  if (in.error.size() != bins_ || in.echo.size() != bins_) throw InvalidArgument("wiener: bin count mismatch");
  const double a = frames_ == 0 ? 0.0 : cfg_.smoothing;
  for (std::size_t k = 0; k < bins_; ++k) {
    smoothed_[k] = a * smoothed_[k] + (1.0 - a) * std::norm(in.error.bins[k]);
    running_min_[k] = std::min(running_min_[k], smoothed_[k]);
    echo_[k] = cfg_.echo_leak * std::norm(in.echo.bins[k]);
  }
  if (++frames_ % sub_length_ == 0) {
    sub_minima_.push_back(running_min_);
    if (sub_minima_.size() > kSubwindows) sub_minima_.pop_front();
    std::fill(running_min_.begin(), running_min_.end(), std::numeric_limits<double>::infinity());
  }

  for (std::size_t k = 0; k < bins_; ++k) {
    double m = running_min_[k];
    for (const auto& sub : sub_minima_) m = std::min(m, sub[k]);
    floor_[k] = std::isfinite(m) ? m : smoothed_[k];
  }
  const std::size_t w = cfg_.noise_spread;
  for (std::size_t k = 0; k < bins_; ++k) {
    const std::size_t lo = k > w ? k - w : 0, hi = std::min(bins_ - 1, k + w);
    double acc = 0.0;
    for (std::size_t j = lo; j <= hi; ++j) acc += floor_[j];
    noise_[k] = cfg_.noise_bias * acc / static_cast<double>(hi - lo + 1);
  }
  return wiener_mask(in.error, noise_, echo_, mask_cfg_);
}

void WienerEstimator::reset() {
  std::fill(smoothed_.begin(), smoothed_.end(), 0.0);
  std::fill(running_min_.begin(), running_min_.end(), std::numeric_limits<double>::infinity());
  sub_minima_.clear();
  frames_ = 0;
}

}  // namespace aenr
