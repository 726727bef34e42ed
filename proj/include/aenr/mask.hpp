// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <deque>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "aenr/features.hpp"
#include "aenr/stft.hpp"

namespace aenr {

struct ComplexMask {
  std::vector<double> magnitude;  // [0, ceiling]
  std::vector<double> phase;      // (-pi, pi]
  std::size_t size() const { return magnitude.size(); }

  static ComplexMask constant(std::size_t bins, double magnitude, double phase = 0.0) {
    return {std::vector<double>(bins, magnitude), std::vector<double>(bins, phase)};
  }
};

struct MaskConfig {
  double ceiling = 2.0;
  double gain_floor = 0.05;
  // |Z| below this is treated as silent by oracle_mask.
  double silence_floor = 1e-10;
};

// Clamps magnitudes into [0, ceiling] and wraps phases; non-finite entries
// become 0.
void sanitize(ComplexMask& mask, double ceiling);

// Compressed-domain complex ratio masking:
//   S~_m = Z~_m * M_m,  S~_p = wrap(Z~_p + M_p).
CompressedFrame apply_mask(const CompressedFrame& z_frame, const ComplexMask& mask);

// Mask that maps the error spectrum onto the clean spectrum in the compressed
// domain, clipped at cfg.ceiling.
ComplexMask oracle_mask(const Spectrum& clean, const Spectrum& error, double alpha, const MaskConfig& cfg = {});

// Power-subtraction Wiener gain with zero phase correction.
ComplexMask wiener_mask(const Spectrum& error, std::span<const double> noise_psd,
                        std::span<const double> echo_psd, const MaskConfig& cfg = {});

// Everything an estimator may look at for one frame.
struct EstimatorInput {
  const ReorientedFeatureBlock& block;
  const Spectrum& error;
  const Spectrum& echo;
  const Spectrum& farend;
};

// Causal per-frame mask estimator. Implementations may carry recurrent state
// that belongs to one stream.
class MaskEstimator {
 public:
  virtual ~MaskEstimator() = default;
  virtual std::string name() const = 0;
  virtual ComplexMask step(const EstimatorInput& in) = 0;
  virtual void reset() = 0;
};

// M_m = 1, M_p = 0: leaves the error signal untouched.
class IdentityEstimator final : public MaskEstimator {
 public:
  explicit IdentityEstimator(std::size_t bins) : bins_(bins) {}
  std::string name() const override { return "identity"; }
  ComplexMask step(const EstimatorInput&) override { return ComplexMask::constant(bins_, 1.0); }
  void reset() override {}

 private:
  std::size_t bins_;
};

// Upper-bound estimator: reads the true near-end signal one hop per frame,
// in lockstep with the pipeline, and emits oracle_mask().
class OracleEstimator final : public MaskEstimator {
 public:
  OracleEstimator(std::vector<double> near_end, const StftConfig& stft, double alpha, const MaskConfig& cfg);
  std::string name() const override { return "oracle"; }
  ComplexMask step(const EstimatorInput& in) override;
  void reset() override;

  // Bins clipped by the ceiling in the most recent frame.
  std::size_t last_clipped() const { return last_clipped_; }

 private:
  std::vector<double> near_;
  Stft stft_;
  FrameBuffer frame_;
  double alpha_;
  MaskConfig cfg_;
  std::size_t cursor_ = 0;
  std::size_t last_clipped_ = 0;
};

struct WienerConfig {
  // Share of the echo estimate power expected to survive as residual echo.
  double echo_leak = 0.05;
  // Smoothing of the error periodogram used for noise tracking.
  double smoothing = 0.7;
  // Minimum-statistics search window in frames, split into 8 sub-windows.
  std::size_t noise_window = 96;
  // Half-width in bins of the frequency smoothing applied to the noise floor.
  std::size_t noise_spread = 4;
  // Compensates the downward bias of the minimum.
  double noise_bias = 2.5;
};

// Non-neural baseline: minimum-statistics noise PSD plus a leak-scaled
// residual echo PSD feeding wiener_mask().
class WienerEstimator final : public MaskEstimator {
 public:
  static constexpr std::size_t kSubwindows = 8;

  WienerEstimator(std::size_t bins, const MaskConfig& mask_cfg, const WienerConfig& cfg = {});
  std::string name() const override { return "wiener"; }
  ComplexMask step(const EstimatorInput& in) override;
  void reset() override;

  // Bias-corrected noise PSD used by the last step().
  std::span<const double> noise_psd() const { return noise_; }

 private:
  std::size_t bins_;
  MaskConfig mask_cfg_;
  WienerConfig cfg_;
  std::size_t sub_length_;
  std::size_t frames_ = 0;
  std::vector<double> smoothed_;
  std::vector<double> running_min_;
  std::deque<std::vector<double>> sub_minima_;
  std::vector<double> floor_;
  std::vector<double> noise_;
  std::vector<double> echo_;
};

}  // namespace aenr
