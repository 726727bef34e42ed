// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/metrics.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>

#include "aenr/error.hpp"

namespace aenr {

std::vector<double> erle(std::span<const double> mic, std::span<const double> error, double block_s,
                         double sample_rate) {
  if (mic.size() != error.size()) throw InvalidArgument("erle: length mismatch");
  const auto block = static_cast<std::size_t>(std::llround(block_s * sample_rate));
  if (block == 0) throw InvalidArgument("erle: block shorter than one sample");
  std::vector<double> out;
  for (std::size_t s = 0; s + block <= mic.size(); s += block) {
    double pm = 0.0, pe = 0.0;
    for (std::size_t i = s; i < s + block; ++i) {
      pm += mic[i] * mic[i];
      pe += error[i] * error[i];
    }
    pm /= static_cast<double>(block);
    pe /= static_cast<double>(block);
    out.push_back(10.0 * std::log10(std::max(pm, kErleFloor) / std::max(pe, kErleFloor)));
  }
  return out;
}

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
  if (estimate.size() != reference.size()) throw InvalidArgument("si_sdr: length mismatch");
  const double ref_energy = std::inner_product(reference.begin(), reference.end(), reference.begin(), 0.0);
  if (!(ref_energy > 0.0)) throw InvalidArgument("si_sdr: reference is all zeros");
  const double dot = std::inner_product(estimate.begin(), estimate.end(), reference.begin(), 0.0);
  const double a = dot / ref_energy;
  double target = 0.0, residual = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double t = a * reference[i];
    const double r = estimate[i] - t;
    target += t * t;
    residual += r * r;
  }
  if (residual <= 0.0) return kSiSdrCapDb;
  if (target <= 0.0) return -kSiSdrCapDb;
  return std::min(kSiSdrCapDb, 10.0 * std::log10(target / residual));
}

double seg_snr(std::span<const double> estimate, std::span<const double> reference, double sample_rate) {
  if (estimate.size() != reference.size()) throw InvalidArgument("seg_snr: length mismatch");
  const auto block = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.03 * sample_rate)));
  double acc = 0.0;
  std::size_t count = 0;
  for (std::size_t s = 0; s + block <= reference.size(); s += block) {
    double ps = 0.0, pn = 0.0;
    for (std::size_t i = s; i < s + block; ++i) {
      ps += reference[i] * reference[i];
      const double d = estimate[i] - reference[i];
      pn += d * d;
    }
    if (ps <= 0.0) continue;
    const double snr = pn > 0.0 ? 10.0 * std::log10(ps / pn) : kSegSnrMaxDb;
    acc += std::clamp(snr, kSegSnrMinDb, kSegSnrMaxDb);
    ++count;
  }
  return count ? acc / static_cast<double>(count) : std::numeric_limits<double>::quiet_NaN();
}

RtfResult rtf(const std::function<void()>& process, double audio_duration_s, int runs) {
  if (!(audio_duration_s > 0.0)) throw InvalidArgument("rtf: audio duration must be positive");
  if (runs < 1) throw InvalidArgument("rtf: need at least one timed run");
  using clock = std::chrono::steady_clock;
  process();  // warm-up
  RtfResult r;
  for (int i = 0; i < runs; ++i) {
    const auto t0 = clock::now();
    process();
    const std::chrono::duration<double> dt = clock::now() - t0;
    // A zero reading (coarse clock, empty work) would break rtf > 0.
    r.runs.push_back(std::max(dt.count(), 1e-9) / audio_duration_s);
  }
  std::vector<double> sorted = r.runs;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();
  r.median = m % 2 ? sorted[m / 2] : 0.5 * (sorted[m / 2 - 1] + sorted[m / 2]);
  r.min = sorted.front();
  r.max = sorted.back();
  return r;
}

double mean(std::span<const double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void write_metrics_csv_header(std::ostream& os) { os << "scenario,estimator,metric,value\n"; }

void write_metrics_csv(std::ostream& os, const std::string& scenario, const std::string& estimator,
                       const MetricsReport& r) {
  const auto row = [&](const char* metric, double v) {
    os << scenario << ',' << estimator << ',' << metric << ',' << std::setprecision(10) << v << '\n';
  };
  row("erle_db", r.erle_mean_db);
  row("si_sdr_db", r.si_sdr_db);
  row("seg_snr_db", r.seg_snr_db);
  row("rtf", r.rtf);
}

}  // namespace aenr
