// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/kalman_aec.hpp"

#include <algorithm>
#include <cmath>

#include "aenr/error.hpp"

namespace aenr {

void KalmanConfig::validate() const {
  if (partitions < 1) throw InvalidArgument("kalman: partitions must be >= 1");
  if (!(smoothing > 0.0 && smoothing < 1.0)) throw InvalidArgument("kalman: smoothing must be in (0, 1)");
  if (!(forgetting > 0.0 && forgetting <= 1.0)) throw InvalidArgument("kalman: forgetting must be in (0, 1]");
  if (!(regularization > 0.0)) throw InvalidArgument("kalman: regularization must be > 0");
  if (!(initial_covariance > 0.0)) throw InvalidArgument("kalman: initial_covariance must be > 0");
  if (fft_order < 2 || (fft_order & (fft_order - 1)) != 0)
    throw InvalidArgument("kalman: fft_order must be a power of two");
  // Partition p covers taps [pR, (p+1)R), which needs blocks of exactly N/2.
  if (hop * 2 != fft_order) throw InvalidArgument("kalman: hop must equal fft_order / 2");
}

KalmanState::KalmanState(std::size_t p, std::size_t k, double initial_covariance)
    : partitions(p),
      bins(k),
      coefficients(p * k),
      state_covariance(p * k, initial_covariance),
      obs_noise_psd(k, 0.0),
      proc_noise_psd(p * k, 0.0),
      farend_history(p, std::vector<Complex>(k)) {}

double KalmanState::coefficient_energy() const {
  double acc = 0.0;
  for (const auto& w : coefficients) acc += std::norm(w);
  return acc;
}

bool KalmanState::valid() const {
  const auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
  return farend_history.size() == partitions &&
         std::all_of(state_covariance.begin(), state_covariance.end(), ok) &&
         std::all_of(obs_noise_psd.begin(), obs_noise_psd.end(), ok) &&
         std::all_of(proc_noise_psd.begin(), proc_noise_psd.end(), ok);
}

std::vector<double> compute_error(std::span<const double> mic, std::span<const double> echo) {
  if (mic.size() != echo.size()) throw InvalidArgument("compute_error: length mismatch");
  std::vector<double> z(mic.size());
  for (std::size_t n = 0; n < mic.size(); ++n) z[n] = mic[n] - echo[n];
  return z;
}

KalmanEchoCanceller::KalmanEchoCanceller(const KalmanConfig& cfg)
    : cfg_((cfg.validate(), cfg)),
      state_(cfg.partitions, cfg.fft_order / 2 + 1, cfg.initial_covariance),
      fft_(cfg.fft_order),
      farend_frame_(cfg.fft_order, cfg.hop),
      time_(cfg.fft_order),
      freq_(cfg.fft_order / 2 + 1),
      gain_(cfg.partitions * (cfg.fft_order / 2 + 1)) {}

void KalmanEchoCanceller::reset() {
  state_ = KalmanState(cfg_.partitions, cfg_.fft_order / 2 + 1, cfg_.initial_covariance);
  farend_frame_.reset();
}

void KalmanEchoCanceller::push_farend(std::span<const double> farend_hop) {
  if (farend_hop.size() != cfg_.hop) throw InvalidArgument("push_farend: expected one hop");
  auto frame = farend_frame_.push(farend_hop);
  auto& hist = state_.farend_history;
  std::rotate(hist.rbegin(), hist.rbegin() + 1, hist.rend());
  fft_.forward(frame, hist.front());
}

Spectrum KalmanEchoCanceller::predict_echo() const {
  const std::size_t K = state_.bins;
  Spectrum out(K);
  for (std::size_t p = 0; p < state_.partitions; ++p) {
    const auto& x = state_.farend_history[p];
    for (std::size_t k = 0; k < K; ++k) out.bins[k] += state_.coef(p, k) * x[k];
  }
  return out;
}

void KalmanEchoCanceller::echo_time(const Spectrum& echo_spec, std::span<double> out) {
  if (out.size() != cfg_.hop) throw InvalidArgument("echo_time: expected one hop");
  fft_.inverse(echo_spec.bins, time_);
  std::copy(time_.end() - static_cast<std::ptrdiff_t>(cfg_.hop), time_.end(), out.begin());
}

Spectrum KalmanEchoCanceller::error_spectrum(std::span<const double> error_hop) {
  if (error_hop.size() != cfg_.hop) throw InvalidArgument("error_spectrum: expected one hop");
  const std::size_t R = cfg_.fft_order - cfg_.hop;
  std::fill(time_.begin(), time_.begin() + static_cast<std::ptrdiff_t>(R), 0.0);
  std::copy(error_hop.begin(), error_hop.end(), time_.begin() + static_cast<std::ptrdiff_t>(R));
  Spectrum out(state_.bins);
  fft_.forward(time_, out.bins);
  return out;
}

void KalmanEchoCanceller::update_observation_noise(const Spectrum& error_spec) {
  const double a = cfg_.smoothing;
  for (std::size_t k = 0; k < state_.bins; ++k)
    state_.obs_noise_psd[k] = a * state_.obs_noise_psd[k] + (1.0 - a) * std::norm(error_spec.bins[k]);
}

void KalmanEchoCanceller::update_process_noise() {
  const double scale = 1.0 - cfg_.forgetting * cfg_.forgetting;
  for (std::size_t i = 0; i < state_.coefficients.size(); ++i)
    state_.proc_noise_psd[i] = scale * std::norm(state_.coefficients[i]);
}

void KalmanEchoCanceller::update(const Spectrum& error_spec) {
  const std::size_t P = state_.partitions;
  const std::size_t K = state_.bins;
  if (error_spec.size() != K) throw InvalidArgument("update: error spectrum has wrong bin count");
  const double n_over_r = static_cast<double>(cfg_.fft_order) / static_cast<double>(cfg_.hop);
  const double r_over_n = 1.0 / n_over_r;

  update_observation_noise(error_spec);

  // Common denominator: sum_q P_q |X_q|^2 + (N/R) Psi_vv.
  std::vector<double> denom(K);
  for (std::size_t k = 0; k < K; ++k) denom[k] = n_over_r * state_.obs_noise_psd[k] + cfg_.regularization;
  for (std::size_t p = 0; p < P; ++p) {
    const auto& x = state_.farend_history[p];
    for (std::size_t k = 0; k < K; ++k) denom[k] += state_.state_covariance[p * K + k] * std::norm(x[k]);
  }

  const std::size_t R = cfg_.fft_order - cfg_.hop;
  for (std::size_t p = 0; p < P; ++p) {
    const auto& x = state_.farend_history[p];
    for (std::size_t k = 0; k < K; ++k) {
      const double mu = state_.state_covariance[p * K + k] / denom[k];
      gain_[p * K + k] = mu;
      freq_[k] = mu * std::conj(x[k]) * error_spec.bins[k];
    }
    if (cfg_.gradient_constraint) {
      // Keep only the first R taps of the correction.
      fft_.inverse(freq_, time_);
      std::fill(time_.begin() + static_cast<std::ptrdiff_t>(R), time_.end(), 0.0);
      fft_.forward(time_, freq_);
    }
    for (std::size_t k = 0; k < K; ++k) {
      state_.coef(p, k) += freq_[k];
      double& cov = state_.state_covariance[p * K + k];
      cov *= std::max(0.0, 1.0 - r_over_n * gain_[p * K + k] * std::norm(x[k]));
    }
  }

  update_process_noise();
  const double l2 = cfg_.forgetting * cfg_.forgetting;
  for (std::size_t i = 0; i < state_.state_covariance.size(); ++i)
    state_.state_covariance[i] = l2 * state_.state_covariance[i] + state_.proc_noise_psd[i];
}

void KalmanEchoCanceller::process(std::span<const double> mic_hop, std::span<const double> farend_hop,
                                  std::span<double> echo_out, std::span<double> error_out) {
  if (mic_hop.size() != cfg_.hop || echo_out.size() != cfg_.hop || error_out.size() != cfg_.hop)
    throw InvalidArgument("process: buffers must hold one hop");
  push_farend(farend_hop);
  echo_time(predict_echo(), echo_out);
  for (std::size_t n = 0; n < cfg_.hop; ++n) error_out[n] = mic_hop[n] - echo_out[n];
  update(error_spectrum(error_out));
}

void KalmanEchoCanceller::set_impulse_response(std::span<const double> taps) {
  const std::size_t R = cfg_.fft_order - cfg_.hop;
  if (taps.size() > cfg_.filter_length())
    throw InvalidArgument("set_impulse_response: more taps than the modeled filter length");
  for (std::size_t p = 0; p < state_.partitions; ++p) {
    std::fill(time_.begin(), time_.end(), 0.0);
    for (std::size_t i = 0; i < R && p * R + i < taps.size(); ++i) time_[i] = taps[p * R + i];
    fft_.forward(time_, freq_);
    std::copy(freq_.begin(), freq_.end(), state_.coefficients.begin() + static_cast<std::ptrdiff_t>(p * state_.bins));
  }
}

std::vector<double> KalmanEchoCanceller::impulse_response() {
  const std::size_t R = cfg_.fft_order - cfg_.hop;
  std::vector<double> taps(cfg_.filter_length());
  for (std::size_t p = 0; p < state_.partitions; ++p) {
    std::copy_n(state_.coefficients.begin() + static_cast<std::ptrdiff_t>(p * state_.bins), state_.bins, freq_.begin());
    fft_.inverse(freq_, time_);
    std::copy_n(time_.begin(), R, taps.begin() + static_cast<std::ptrdiff_t>(p * R));
  }
  return taps;
}

}  // namespace aenr
