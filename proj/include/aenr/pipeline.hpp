// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aenr/config.hpp"
#include "aenr/features.hpp"
#include "aenr/kalman_aec.hpp"
#include "aenr/mask.hpp"
#include "aenr/stft.hpp"

namespace aenr {

// Builds an estimator from "identity", "oracle", "wiener" or "neural:<path>".
// "oracle" needs the near-end reference. Throws ConfigError.
std::unique_ptr<MaskEstimator> make_estimator(const std::string& selector, const PipelineConfig& cfg,
                                              std::span<const double> near_reference = {});

struct FrameStats {
  std::int64_t frame = 0;
  double mic_power = 0.0;
  double error_power = 0.0;
  double output_power = 0.0;
  double coefficient_energy = 0.0;
};

struct ProcessResult {
  std::vector<double> output;  // near-end estimate, latency-compensated
  std::vector<double> error;   // z = x - e_hat
  std::vector<double> echo;    // e_hat
};

// Kalman echo canceller followed by the mask post-filter, one hop per call:
//   z = x - e_hat -> STFT{z, e_hat, y} -> compress + reorient -> estimator ->
//   apply mask to compressed Z -> decompress -> overlap-add.
class Pipeline {
 public:
  Pipeline(PipelineConfig cfg, std::unique_ptr<MaskEstimator> estimator);

  const PipelineConfig& config() const { return cfg_; }
  const SubbandLayout& layout() const { return layout_; }
  const KalmanEchoCanceller& canceller() const { return kf_; }
  MaskEstimator& estimator() { return *estimator_; }
  std::size_t hop() const { return cfg_.stft.hop; }
  // Output lags the microphone by this many samples.
  std::size_t latency() const { return cfg_.stft.fft_order - cfg_.stft.hop; }

  // mic/farend/out each hold exactly hop() samples. echo_out/error_out, when
  // non-empty, receive the KF signals for the same hop (no latency).
  void process_block(std::span<const double> mic, std::span<const double> farend, std::span<double> out,
                     std::span<double> echo_out = {}, std::span<double> error_out = {});

  // Whole-signal processing from a fresh state. The output is shifted back by
  // latency() so it lines up with mic sample for sample.
  ProcessResult process(std::span<const double> mic, std::span<const double> farend);

  void set_frame_observer(std::function<void(const FrameStats&)> fn) { observer_ = std::move(fn); }
  void reset();

 private:
  PipelineConfig cfg_;
  SubbandLayout layout_;
  std::unique_ptr<MaskEstimator> estimator_;
  KalmanEchoCanceller kf_;
  Stft stft_;
  FrameBuffer z_frame_, e_frame_, y_frame_;
  OverlapState ola_;
  std::int64_t frame_ = 0;
  std::vector<double> echo_, error_;
  std::function<void(const FrameStats&)> observer_;
};

}  // namespace aenr
