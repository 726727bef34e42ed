// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/neural.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <fstream>
#include <limits>

#include "aenr/config.hpp"
#include "aenr/error.hpp"
#include "aenr/pipeline.hpp"
#include "test_util.hpp"

namespace aenr {
namespace {

NeuralTopology toy() {
  NeuralTopology t;
  t.rows = 6;
  t.cols = 8;
  t.bins = 9;
  t.conv_channels = 2;
  t.conv_kernel = 3;
  t.hidden = 4;
  return t;
}

ReorientedFeatureBlock random_block(const NeuralTopology& t, std::uint64_t seed) {
  ReorientedFeatureBlock b;
  b.rows = t.rows;
  b.cols = t.cols;
  b.data = testing::gaussian(std::size_t{t.rows} * t.cols, seed);
  for (auto& v : b.data) v = std::abs(v);
  return b;
}

std::vector<char> slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), {}};
}

void spit(const std::filesystem::path& p, const std::vector<char>& bytes) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

TEST(NeuralTopology, DefaultMatchesFeatureGeometry) {
  NeuralTopology t;
  auto l = make_layout(257, 48, 0.33);
  EXPECT_EQ(t.rows, l.rows());
  EXPECT_EQ(t.cols, l.band_length);
  EXPECT_EQ(t.bins, l.bins);
  EXPECT_NO_THROW(t.validate());
  const auto w = NeuralWeights::zeros(t);
  std::size_t n = 0;
  for (auto s : w.tensors()) n += s.size();
  EXPECT_EQ(n, t.parameter_count());
}

TEST(NeuralTopology, InvalidThrowsConfigError) {
  auto t = toy();
  t.hidden = 0;
  EXPECT_THROW(t.validate(), ConfigError);
  t = toy();
  t.conv_kernel = 2;
  EXPECT_THROW(t.validate(), ConfigError);
}

TEST(Neural, ZeroWeightsGiveHalfMagnitude) {
  NeuralMaskEstimator est(NeuralWeights::zeros(NeuralTopology{}));
  ReorientedFeatureBlock b = random_block(NeuralTopology{}, 1);
  for (int f = 0; f < 3; ++f) {
    auto m = est.step(b);
    ASSERT_EQ(m.size(), 257u);
    for (double v : m.magnitude) EXPECT_EQ(v, 0.5);
    for (double p : m.phase) EXPECT_EQ(p, 0.0);
  }
}

TEST(Neural, DeterministicAcrossInstances) {
  const auto w = NeuralWeights::random(NeuralTopology{}, 42);
  NeuralMaskEstimator a(w), b(NeuralWeights::random(NeuralTopology{}, 42));
  for (std::uint64_t f = 0; f < 10; ++f) {
    auto blk = random_block(NeuralTopology{}, 100 + f);
    auto ma = a.step(blk), mb = b.step(blk);
    ASSERT_EQ(ma.magnitude, mb.magnitude);
    ASSERT_EQ(ma.phase, mb.phase);
  }
  a.reset();
  b.reset();
  auto blk = random_block(NeuralTopology{}, 7);
  EXPECT_EQ(a.step(blk).magnitude, b.step(blk).magnitude);
}

TEST(Neural, MaskInvariants) {
  NeuralMaskEstimator est(NeuralWeights::random(NeuralTopology{}, 3), 2.0);
  for (std::uint64_t f = 0; f < 5; ++f) {
    auto m = est.step(random_block(NeuralTopology{}, f));
    for (double v : m.magnitude) ASSERT_TRUE(v >= 0.0 && v <= 2.0);
    for (double p : m.phase) ASSERT_TRUE(p > -std::numbers::pi && p <= std::numbers::pi);
  }
}

TEST(Neural, RecurrentStateCarries) {
  NeuralMaskEstimator est(NeuralWeights::random(NeuralTopology{}, 5));
  auto blk = random_block(NeuralTopology{}, 9);
  auto m1 = est.step(blk);
  auto m2 = est.step(blk);
  EXPECT_NE(m1.magnitude, m2.magnitude);
  est.reset();
  EXPECT_EQ(est.step(blk).magnitude, m1.magnitude);
}

// Central differences on every parameter of a toy network.
void check_gradient(bool magnitude_loss) {
  const auto t = toy();
  auto w = NeuralWeights::random(t, 11);
  const auto blk = random_block(t, 12);
  const auto h_in = testing::gaussian(t.hidden, 13, 0.5);
  std::vector<double> dmag(t.bins, magnitude_loss ? 1.0 : 0.0), dphase(t.bins, magnitude_loss ? 0.0 : 1.0);

  const auto loss = [&](const NeuralWeights& ww) {
    NeuralMaskEstimator e(ww, 1e9);
    auto m = e.forward(blk, h_in);
    // Ceiling is set high so the sigmoid output is never clipped.
    double l = 0.0;
    for (std::size_t k = 0; k < t.bins; ++k) l += dmag[k] * m.magnitude[k] + dphase[k] * m.phase[k];
    return l;
  };
  const auto grad = NeuralMaskEstimator(w, 1e9).gradient(blk, h_in, dmag, dphase);
  auto params = w.tensors();
  const auto gts = grad.tensors();
  const double h = 1e-6;
  std::size_t checked = 0;
  for (std::size_t ti = 0; ti < params.size(); ++ti)
    for (std::size_t i = 0; i < params[ti].size(); ++i) {
      const double orig = params[ti][i];
      params[ti][i] = orig + h;
      const double lp = loss(w);
      params[ti][i] = orig - h;
      const double lm = loss(w);
      params[ti][i] = orig;
      const double num = (lp - lm) / (2 * h);
      const double ana = gts[ti][i];
      const double scale = std::max({std::abs(num), std::abs(ana), 1e-6});
      ASSERT_LE(std::abs(num - ana) / scale, 1e-4) << "tensor " << ti << " index " << i << " num " << num
                                                  << " ana " << ana;
      ++checked;
    }
  EXPECT_EQ(checked, t.parameter_count());
}

TEST(Neural, GradientMatchesFiniteDifferencesMagnitude) { check_gradient(true); }
TEST(Neural, GradientMatchesFiniteDifferencesPhase) { check_gradient(false); }

TEST(NeuralWeights, SaveLoadRoundTrip) {
  auto dir = testing::temp_dir("neural_rt");
  const auto w = NeuralWeights::random(toy(), 17);
  w.save(dir / "w.bin");
  const auto r = NeuralWeights::load(dir / "w.bin");
  EXPECT_EQ(r.topology, w.topology);
  auto a = w.tensors(), b = r.tensors();
  for (std::size_t i = 0; i < a.size(); ++i)
    EXPECT_TRUE(std::equal(a[i].begin(), a[i].end(), b[i].begin(), b[i].end()));
  EXPECT_EQ(std::filesystem::file_size(dir / "w.bin"), 4u + 4u + 6u * 4u + 4u * toy().parameter_count());
}

TEST(NeuralWeights, LoadErrors) {
  auto dir = testing::temp_dir("neural_err");
  EXPECT_THROW(NeuralWeights::load(dir / "missing.bin"), IoError);

  NeuralWeights::random(toy(), 1).save(dir / "good.bin");
  const auto good = slurp(dir / "good.bin");

  auto bad = good;
  bad[0] = 'X';
  spit(dir / "magic.bin", bad);
  EXPECT_THROW(NeuralWeights::load(dir / "magic.bin"), FormatError);

  bad = good;
  bad[4] = 9;
  spit(dir / "version.bin", bad);
  EXPECT_THROW(NeuralWeights::load(dir / "version.bin"), FormatError);

  bad.assign(good.begin(), good.end() - 4);
  spit(dir / "short.bin", bad);
  EXPECT_THROW(NeuralWeights::load(dir / "short.bin"), FormatError);

  bad = good;
  bad.push_back(0);
  spit(dir / "long.bin", bad);
  EXPECT_THROW(NeuralWeights::load(dir / "long.bin"), FormatError);

  bad.assign(good.begin(), good.begin() + 10);
  spit(dir / "header.bin", bad);
  EXPECT_THROW(NeuralWeights::load(dir / "header.bin"), FormatError);

  bad = good;
  const float nan = std::numeric_limits<float>::quiet_NaN();
  std::memcpy(bad.data() + bad.size() - 4, &nan, 4);
  spit(dir / "nan.bin", bad);
  EXPECT_THROW(NeuralWeights::load(dir / "nan.bin"), FormatError);
}

TEST(Neural, GeometryMismatchIsConfigError) {
  NeuralMaskEstimator est(NeuralWeights::zeros(toy()));
  EXPECT_THROW(est.check_geometry(make_layout(257, 48, 0.33)), ConfigError);

  auto dir = testing::temp_dir("neural_geom");
  NeuralWeights::random(toy(), 2).save(dir / "toy.bin");
  PipelineConfig cfg;
  EXPECT_THROW(make_estimator("neural:" + (dir / "toy.bin").string(), cfg), ConfigError);
  NeuralWeights::random(NeuralTopology{}, 2).save(dir / "ok.bin");
  EXPECT_NO_THROW(make_estimator("neural:" + (dir / "ok.bin").string(), cfg));
}

TEST(Neural, WrongBlockShapeThrows) {
  NeuralMaskEstimator est(NeuralWeights::zeros(toy()));
  EXPECT_THROW(est.step(random_block(NeuralTopology{}, 1)), InvalidArgument);
}

}  // namespace
}  // namespace aenr
