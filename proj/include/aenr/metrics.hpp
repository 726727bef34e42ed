// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

namespace aenr {

inline constexpr double kErleFloor = 1e-12;
inline constexpr double kSiSdrCapDb = 100.0;
inline constexpr double kSegSnrMinDb = -10.0;
inline constexpr double kSegSnrMaxDb = 35.0;

// Per-block 10 log10(P_mic / max(P_error, floor)). A trailing partial block
// is dropped.
std::vector<double> erle(std::span<const double> mic, std::span<const double> error, double block_s,
                         double sample_rate);

// Scale-invariant SDR, capped at +100 dB. Throws InvalidArgument on length
// mismatch or an all-zero reference.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);

// Segmental SNR over 30 ms blocks, each clamped to [-10, 35] dB. Blocks where
// the reference is silent are skipped.
double seg_snr(std::span<const double> estimate, std::span<const double> reference, double sample_rate);

struct RtfResult {
  double median = 0.0;
  double min = 0.0;
  double max = 0.0;
  std::vector<double> runs;
};

// Runs `process` once to warm up, then `runs` more times; reports wall-clock
// time / audio duration.
RtfResult rtf(const std::function<void()>& process, double audio_duration_s, int runs = 5);

struct MetricsReport {
  std::vector<double> erle_db;
  double erle_mean_db = 0.0;
  double si_sdr_db = 0.0;
  double seg_snr_db = 0.0;
  double rtf = 0.0;
};

double mean(std::span<const double> v);

// Long-format rows "scenario,estimator,metric,value".
void write_metrics_csv_header(std::ostream& os);
void write_metrics_csv(std::ostream& os, const std::string& scenario, const std::string& estimator,
                       const MetricsReport& r);

}  // namespace aenr
