// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aenr/fft.hpp"
#include "aenr/stft.hpp"

namespace aenr {

struct KalmanConfig {
  std::size_t partitions = 10;
  // Retention factor of the observation-noise PSD recursion.
  double smoothing = 0.8;
  std::size_t fft_order = 512;
  std::size_t hop = 256;
  // lambda in Psi_DD = (1 - lambda^2) |W|^2.
  double forgetting = 0.999;
  double regularization = 1e-10;
  double initial_covariance = 1e2;
  bool gradient_constraint = true;

  // Modeled echo-path length in samples.
  std::size_t filter_length() const { return partitions * (fft_order - hop); }
  void validate() const;
};

// Diagonalized state of a partitioned-block frequency-domain Kalman filter.
// Per-partition arrays are stored partition-major: index p * bins + k.
struct KalmanState {
  std::size_t partitions = 0;
  std::size_t bins = 0;
  std::vector<Complex> coefficients;
  std::vector<double> state_covariance;
  std::vector<double> obs_noise_psd;
  std::vector<double> proc_noise_psd;
  // farend_history[0] is the newest far-end block spectrum.
  std::vector<std::vector<Complex>> farend_history;

  KalmanState() = default;
  KalmanState(std::size_t p, std::size_t k, double initial_covariance);

  Complex& coef(std::size_t p, std::size_t k) { return coefficients[p * bins + k]; }
  const Complex& coef(std::size_t p, std::size_t k) const { return coefficients[p * bins + k]; }
  double coefficient_energy() const;
  // True when every PSD/covariance entry is finite and non-negative and the
  // history holds exactly `partitions` blocks.
  bool valid() const;
};

// z(n) = x(n) - e_hat(n).
std::vector<double> compute_error(std::span<const double> mic, std::span<const double> echo);

// Overlap-save echo canceller. Per hop of R = fft_order - hop samples the call
// order is push_farend -> predict_echo -> echo_time -> error_spectrum -> update.
// process() runs the whole sequence.
class KalmanEchoCanceller {
 public:
  explicit KalmanEchoCanceller(const KalmanConfig& cfg);

  const KalmanConfig& config() const { return cfg_; }
  const KalmanState& state() const { return state_; }
  KalmanState& mutable_state() { return state_; }
  std::size_t block_size() const { return cfg_.hop; }

  void push_farend(std::span<const double> farend_hop);
  // E_hat(k) = sum_p W_p(k) X_p(k).
  Spectrum predict_echo() const;
  // Last R samples of the inverse transform; circular wrap-around is discarded.
  void echo_time(const Spectrum& echo_spec, std::span<double> out);
  // Spectrum of the zero-prefixed error block [0_R; e].
  Spectrum error_spectrum(std::span<const double> error_hop);

  // Observation-noise recursion, Kalman gain, coefficient/covariance update,
  // process-noise estimate and covariance time update.
  void update(const Spectrum& error_spec);
  void update_observation_noise(const Spectrum& error_spec);
  void update_process_noise();

  // Full per-hop step; writes the echo estimate and error signal.
  void process(std::span<const double> mic_hop, std::span<const double> farend_hop,
               std::span<double> echo_out, std::span<double> error_out);

  // Loads/reads coefficients as a time-domain impulse response of up to
  // filter_length() taps.
  void set_impulse_response(std::span<const double> taps);
  std::vector<double> impulse_response();

  void reset();

 private:
  KalmanConfig cfg_;
  KalmanState state_;
  RealFft fft_;
  FrameBuffer farend_frame_;
  std::vector<double> time_;
  std::vector<Complex> freq_;
  std::vector<double> gain_;
};

}  // namespace aenr
