// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/metrics.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <sstream>

#include "aenr/error.hpp"
#include "test_util.hpp"

namespace aenr {
namespace {

TEST(Erle, ErrorEqualsMic) {
  auto x = testing::gaussian(32000, 1);
  for (double v : erle(x, x, 0.5, 16000.0)) EXPECT_NEAR(v, 0.0, 1e-12);
}

TEST(Erle, TenfoldAmplitude) {
  auto x = testing::gaussian(32000, 2);
  std::vector<double> e(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) e[i] = x[i] / 10.0;
  auto v = erle(x, e, 1.0, 16000.0);
  ASSERT_EQ(v.size(), 2u);
  for (double d : v) EXPECT_NEAR(d, 20.0, 1e-9);
}

TEST(Erle, PerfectCancellerHitsFloor) {
  auto x = testing::gaussian(16000, 3);
  std::vector<double> zero(x.size(), 0.0);
  auto v = erle(x, zero, 1.0, 16000.0);
  const double p = testing::energy(x) / x.size();
  EXPECT_NEAR(v[0], 10.0 * std::log10(p / kErleFloor), 1e-9);
  EXPECT_TRUE(std::isfinite(v[0]));
}

TEST(Erle, PartialBlockDroppedAndErrors) {
  auto x = testing::gaussian(25000, 4);
  EXPECT_EQ(erle(x, x, 1.0, 16000.0).size(), 1u);
  std::vector<double> shorter(100);
  EXPECT_THROW(erle(x, shorter, 1.0, 16000.0), InvalidArgument);
  EXPECT_THROW(erle(x, x, 0.0, 16000.0), InvalidArgument);
}

TEST(SiSdr, IdentityHitsCap) {
  auto x = testing::gaussian(1000, 5);
  EXPECT_EQ(si_sdr(x, x), kSiSdrCapDb);
}

TEST(SiSdr, ScaleInvariance) {
  auto x = testing::gaussian(1000, 6);
  for (double c : {2.0, -0.5, 1e-3, 1e3}) {
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = c * x[i];
    EXPECT_EQ(si_sdr(y, x), kSiSdrCapDb) << c;
  }
}

TEST(SiSdr, OrthogonalNoiseEqualPowerIsZeroDb) {
  auto ref = testing::gaussian(4000, 7);
  auto r = testing::gaussian(4000, 8);
  double dot = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) dot += r[i] * ref[i];
  const double rr = testing::energy(ref);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= dot / rr * ref[i];
  const double g = std::sqrt(rr / testing::energy(r));
  std::vector<double> est(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) est[i] = ref[i] + g * r[i];
  EXPECT_NEAR(si_sdr(est, ref), 0.0, 1e-9);
}

TEST(SiSdr, Errors) {
  std::vector<double> zero(10, 0.0), x(10, 1.0), y(9, 1.0);
  EXPECT_THROW(si_sdr(x, zero), InvalidArgument);
  EXPECT_THROW(si_sdr(x, y), InvalidArgument);
}

TEST(SegSnr, ClampedRange) {
  auto ref = testing::gaussian(16000, 9);
  EXPECT_NEAR(seg_snr(ref, ref, 16000.0), kSegSnrMaxDb, 1e-12);
  std::vector<double> bad(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) bad[i] = ref[i] - 100.0 * ref[i];
  EXPECT_NEAR(seg_snr(bad, ref, 16000.0), kSegSnrMinDb, 1e-12);
}

TEST(SegSnr, KnownRatio) {
  auto ref = testing::gaussian(4800, 10);
  std::vector<double> est(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) est[i] = ref[i] * 1.1;  // error = 0.1 ref -> 20 dB
  EXPECT_NEAR(seg_snr(est, ref, 16000.0), 20.0, 1e-9);
}

TEST(SegSnr, SilentBlocksSkipped) {
  auto ref = testing::gaussian(960, 11);
  ref.resize(1920, 0.0);
  std::vector<double> est(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) est[i] = ref[i] * 1.1 + (i >= 960 ? 1.0 : 0.0);
  EXPECT_NEAR(seg_snr(est, ref, 16000.0), 20.0, 1e-9);
}

TEST(Rtf, NoOpIsTiny) {
  auto r = rtf([] {}, 10.0, 5);
  EXPECT_EQ(r.runs.size(), 5u);
  EXPECT_LT(r.median, 0.01);
  EXPECT_GT(r.median, 0.0);
  EXPECT_LE(r.min, r.median);
  EXPECT_GE(r.max, r.median);
}

TEST(Rtf, MonotoneUnderBusyWait) {
  const auto busy = [](double ms) {
    return [ms] {
      const auto end = std::chrono::steady_clock::now() + std::chrono::duration<double, std::milli>(ms);
      while (std::chrono::steady_clock::now() < end) {
      }
    };
  };
  const double a = rtf(busy(2.0), 1.0, 5).median;
  const double b = rtf(busy(10.0), 1.0, 5).median;
  EXPECT_LT(a, b);
  EXPECT_NEAR(b, 0.01, 0.005);
}

TEST(MetricsCsv, LongFormat) {
  std::ostringstream os;
  write_metrics_csv_header(os);
  MetricsReport r;
  r.erle_mean_db = 12.5;
  r.si_sdr_db = 3.25;
  r.seg_snr_db = std::nan("");
  r.rtf = 0.1;
  write_metrics_csv(os, "s1", "wiener", r);
  const std::string out = os.str();
  EXPECT_EQ(out.rfind("scenario,estimator,metric,value\n", 0), 0u);
  EXPECT_NE(out.find("s1,wiener,erle_db,12.5"), std::string::npos);
  EXPECT_NE(out.find("s1,wiener,si_sdr_db,3.25"), std::string::npos);
  EXPECT_NE(out.find("s1,wiener,seg_snr_db,nan"), std::string::npos);
}

TEST(Mean, Basic) {
  std::vector<double> v{1, 2, 3, 6};
  EXPECT_DOUBLE_EQ(mean(v), 3.0);
}

}  // namespace
}  // namespace aenr
