// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/stft.hpp"

#include <gtest/gtest.h>

#include <numbers>

#include "aenr/error.hpp"
#include "aenr/fft.hpp"
#include "aenr/sim.hpp"
#include "test_util.hpp"

namespace aenr {
namespace {

using testing::gaussian;
using testing::naive_dft;

// Streams x through analyze/synthesize; returns output aligned to x (the
// first frame of warm-up is left out of the comparison by the caller).
std::vector<double> round_trip(const StftConfig& cfg, std::span<const double> x) {
  Stft stft(cfg);
  FrameBuffer buf(cfg.fft_order, cfg.hop);
  auto ola = stft.make_overlap_state();
  const std::size_t lat = cfg.fft_order - cfg.hop;
  std::vector<double> padded(x.begin(), x.end());
  padded.resize(x.size() + lat + cfg.hop, 0.0);
  std::vector<double> out(padded.size());
  for (std::size_t i = 0; i + cfg.hop <= padded.size(); i += cfg.hop) {
    auto frame = buf.push({padded.data() + i, cfg.hop});
    stft.synthesize(stft.analyze(frame), ola, {out.data() + i, cfg.hop});
  }
  return {out.begin() + static_cast<std::ptrdiff_t>(lat), out.begin() + static_cast<std::ptrdiff_t>(lat + x.size())};
}

double steady_error_db(const StftConfig& cfg, std::span<const double> x) {
  auto y = round_trip(cfg, x);
  const std::size_t skip = cfg.fft_order;
  return testing::relative_error_db(std::span<const double>(y).subspan(skip), x.subspan(skip));
}

TEST(Fft, MatchesNaiveDft) {
  for (std::size_t n : {2u, 8u, 64u, 512u}) {
    RealFft fft(n);
    auto x = gaussian(n, n);
    std::vector<Complex> X(n / 2 + 1);
    fft.forward(x, X);
    auto ref = naive_dft(x);
    for (std::size_t k = 0; k < X.size(); ++k) EXPECT_LT(std::abs(X[k] - ref[k]), 1e-9) << n << " " << k;
    std::vector<double> back(n);
    fft.inverse(X, back);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(back[i], x[i], 1e-12);
  }
}

TEST(Fft, RejectsNonPowerOfTwo) {
  EXPECT_THROW(RealFft(0), InvalidArgument);
  EXPECT_THROW(RealFft(1), InvalidArgument);
  EXPECT_THROW(RealFft(500), InvalidArgument);
}

TEST(Stft, ConfigValidation) {
  StftConfig c;
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.bins(), 257u);
  c.fft_order = 500;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.hop = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c.hop = 513;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.sample_rate = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
}

TEST(Stft, WindowNames) {
  EXPECT_EQ(window_from_string("sqrt_hann"), Window::kSqrtHann);
  EXPECT_EQ(window_from_string(to_string(Window::kRectangular)), Window::kRectangular);
  EXPECT_THROW(window_from_string("kaiser"), InvalidArgument);
}

TEST(Stft, ZeroFrameGivesZeroSpectrum) {
  Stft stft(StftConfig{});
  std::vector<double> zeros(512, 0.0);
  auto s = stft.analyze(zeros, 3);
  ASSERT_EQ(s.size(), 257u);
  EXPECT_EQ(s.frame_index, 3);
  for (auto b : s.bins) EXPECT_EQ(b, Complex(0.0, 0.0));
}

TEST(Stft, RectangularDc) {
  StftConfig cfg;
  cfg.window = Window::kRectangular;
  Stft stft(cfg);
  std::vector<double> ones(512, 1.0);
  auto s = stft.analyze(ones);
  EXPECT_NEAR(s.bins[0].real(), 512.0, 1e-9);
  for (std::size_t k = 1; k < s.size(); ++k) EXPECT_LT(std::abs(s.bins[k]), 1e-9);
}

TEST(Stft, BinCenteredSinusoidMatchesNaiveDft) {
  StftConfig cfg;
  Stft stft(cfg);
  const std::size_t m = 37;
  std::vector<double> x(512);
  for (std::size_t n = 0; n < x.size(); ++n)
    x[n] = std::cos(2.0 * std::numbers::pi * (cfg.sample_rate * m / 512.0) * n / cfg.sample_rate);
  auto s = stft.analyze(x);

  std::vector<double> xw(512);
  auto w = stft.window();
  for (std::size_t n = 0; n < 512; ++n) xw[n] = x[n] * w[n];
  auto ref = naive_dft(xw);
  double max_dev = 0.0;
  std::size_t peak = 0;
  for (std::size_t k = 0; k < s.size(); ++k) {
    max_dev = std::max(max_dev, std::abs(s.bins[k] - ref[k]));
    if (std::abs(s.bins[k]) > std::abs(s.bins[peak])) peak = k;
  }
  EXPECT_LT(max_dev, 1e-9);
  EXPECT_EQ(peak, m);
}

TEST(Stft, EdgeBinsAreReal) {
  Stft stft(StftConfig{});
  auto s = stft.analyze(gaussian(512, 4));
  EXPECT_EQ(s.bins.front().imag(), 0.0);
  EXPECT_EQ(s.bins.back().imag(), 0.0);
}

TEST(Stft, LengthMismatchThrows) {
  Stft stft(StftConfig{});
  std::vector<double> x(511);
  EXPECT_THROW(stft.analyze(x), InvalidArgument);
  auto ola = stft.make_overlap_state();
  Spectrum bad(100);
  std::vector<double> out(256);
  EXPECT_THROW(stft.synthesize(bad, ola, out), InvalidArgument);
  Spectrum ok(257);
  std::vector<double> short_out(100);
  EXPECT_THROW(stft.synthesize(ok, ola, short_out), InvalidArgument);
}

TEST(Stft, Linearity) {
  Stft stft(StftConfig{});
  auto u = gaussian(512, 1), v = gaussian(512, 2);
  const double a = 0.7, b = -2.3;
  std::vector<double> mix(512);
  for (std::size_t n = 0; n < 512; ++n) mix[n] = a * u[n] + b * v[n];
  auto su = stft.analyze(u), sv = stft.analyze(v), sm = stft.analyze(mix);
  for (std::size_t k = 0; k < sm.size(); ++k) EXPECT_LT(std::abs(sm.bins[k] - (a * su.bins[k] + b * sv.bins[k])), 1e-10);
}

TEST(Stft, Parseval) {
  Stft stft(StftConfig{});
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto x = gaussian(512, 100 + seed);
    auto s = stft.analyze(x);
    double spec = std::norm(s.bins.front()) + std::norm(s.bins.back());
    for (std::size_t k = 1; k + 1 < s.size(); ++k) spec += 2.0 * std::norm(s.bins[k]);
    double time = 0.0;
    auto w = stft.window();
    for (std::size_t n = 0; n < 512; ++n) time += x[n] * x[n] * w[n] * w[n];
    EXPECT_NEAR(spec / (512.0 * time), 1.0, 1e-8);
  }
}

TEST(Stft, ZeroSpectrumStreamGivesZeroOutput) {
  Stft stft(StftConfig{});
  auto ola = stft.make_overlap_state();
  Spectrum zero(257);
  std::vector<double> out(256, 1.0);
  for (int i = 0; i < 4; ++i) {
    stft.synthesize(zero, ola, out);
    for (double v : out) EXPECT_EQ(v, 0.0);
  }
}

TEST(Stft, ConstantInputReproducesConstant) {
  StftConfig cfg;
  std::vector<double> x(512 * 12, 0.25);
  auto y = round_trip(cfg, x);
  for (std::size_t n = 512; n < x.size(); ++n) ASSERT_NEAR(y[n], 0.25, 1e-12) << n;
}

TEST(Stft, RoundTripWhiteNoise) {
  auto x = gaussian(16000, 11);
  EXPECT_LE(steady_error_db(StftConfig{}, x), -80.0);
}

TEST(Stft, RoundTripSpeechShaped) {
  auto x = shaped_noise(16000, kSpeechShapedSlopeDb, 16000.0, 12);
  EXPECT_LE(steady_error_db(StftConfig{}, x), -80.0);
}

TEST(Stft, RoundTripOtherGeometries) {
  auto x = gaussian(8000, 13);
  StftConfig quarter;
  quarter.hop = 128;
  EXPECT_LE(steady_error_db(quarter, x), -80.0);
  StftConfig small;
  small.fft_order = 64;
  small.hop = 32;
  EXPECT_LE(steady_error_db(small, x), -80.0);
}

TEST(Compression, UnitMagnitudeIsFixedPoint) {
  Spectrum s(4);
  s.bins = {{1, 0}, {0, 1}, {-1, 0}, {std::sqrt(0.5), -std::sqrt(0.5)}};
  for (double alpha : {0.1, 0.3, 1.0}) {
    auto c = compress(s, alpha);
    for (double m : c.magnitude) EXPECT_NEAR(m, 1.0, 1e-15);
  }
}

TEST(Compression, ZeroBin) {
  Spectrum s(1);
  auto c = compress(s, 0.3);
  EXPECT_EQ(c.magnitude[0], 0.0);
  EXPECT_EQ(c.phase[0], 0.0);
  auto d = decompress(c, 0.3);
  EXPECT_EQ(d.bins[0], Complex(0.0, 0.0));
}

TEST(Compression, PowerLawValue) {
  Spectrum s(1);
  s.bins[0] = {32.0, 0.0};
  auto c = compress(s, 0.3);
  EXPECT_NEAR(c.magnitude[0], std::pow(32.0, 0.3), 1e-12);
  EXPECT_NEAR(std::abs(decompress(c, 0.3).bins[0] - s.bins[0]) / 32.0, 0.0, 1e-9);
}

TEST(Compression, DecompressExamples) {
  CompressedFrame f{{1.0, 0.0}, {0.0, 1.0}};
  auto d = decompress(f, 0.3);
  EXPECT_EQ(d.bins[0], Complex(1.0, 0.0));
  EXPECT_EQ(d.bins[1], Complex(0.0, 0.0));
}

TEST(Compression, RoundTripRandom) {
  for (double alpha : {0.05, 0.3, 0.77, 1.0}) {
    Spectrum s(1000);
    s.bins = testing::random_bins(1000, 5, 10.0);
    auto back = decompress(compress(s, alpha), alpha);
    for (std::size_t k = 0; k < s.size(); ++k)
      ASSERT_LT(std::abs(back.bins[k] - s.bins[k]) / std::abs(s.bins[k]), 1e-9) << alpha;
  }
}

TEST(Compression, AlphaOutOfRangeThrows) {
  Spectrum s(3);
  for (double alpha : {0.0, -0.3, 1.5, std::nan("")}) {
    EXPECT_THROW(compress(s, alpha), InvalidArgument);
    EXPECT_THROW(decompress(CompressedFrame{{1}, {0}}, alpha), InvalidArgument);
  }
}

TEST(Compression, PhaseInRange) {
  Spectrum s(2000);
  s.bins = testing::random_bins(2000, 6);
  s.bins[0] = {-1.0, 0.0};
  s.bins[1] = {-1.0, -0.0};
  auto c = compress(s, 0.3);
  for (double p : c.phase) {
    EXPECT_GT(p, -std::numbers::pi);
    EXPECT_LE(p, std::numbers::pi);
  }
}

TEST(Compression, WrapPhase) {
  EXPECT_DOUBLE_EQ(wrap_phase(std::numbers::pi), std::numbers::pi);
  EXPECT_DOUBLE_EQ(wrap_phase(-std::numbers::pi), std::numbers::pi);
  EXPECT_NEAR(wrap_phase(3 * std::numbers::pi / 2), -std::numbers::pi / 2, 1e-12);
  EXPECT_NEAR(wrap_phase(0.25 + 8 * std::numbers::pi), 0.25, 1e-12);
}

TEST(FrameBuffer, SlidesByHop) {
  FrameBuffer fb(4, 2);
  std::vector<double> a{1, 2}, b{3, 4}, c{5, 6};
  fb.push(a);
  fb.push(b);
  auto f = fb.push(c);
  EXPECT_EQ(std::vector<double>(f.begin(), f.end()), (std::vector<double>{3, 4, 5, 6}));
  fb.reset();
  for (double v : fb.frame()) EXPECT_EQ(v, 0.0);
  std::vector<double> wrong(3);
  EXPECT_THROW(fb.push(wrong), InvalidArgument);
}

}  // namespace
}  // namespace aenr
