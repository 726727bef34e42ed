// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/neural.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <string>

#include "aenr/error.hpp"

namespace aenr {

namespace {

constexpr std::array<char, 4> kMagic = {'A', 'N', 'R', 'W'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 4 + 4 * 7;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

std::uint32_t read_u32(const unsigned char* p) {
  return std::uint32_t{p[0]} | (std::uint32_t{p[1]} << 8) | (std::uint32_t{p[2]} << 16) |
         (std::uint32_t{p[3]} << 24);
}

void write_u32(std::ostream& os, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                     static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  os.write(b, 4);
}

struct Shape {
  std::size_t conv_w, conv_b, gru_wx, gru_wh, gru_b, head_w, head_b;
};

Shape shape_of(const NeuralTopology& t) {
  const std::size_t h3 = 3 * std::size_t{t.hidden};
  return {std::size_t{t.conv_channels} * t.rows * t.conv_kernel,
          t.conv_channels,
          h3 * t.input_dim(),
          h3 * t.hidden,
          h3,
          std::size_t{t.bins} * t.hidden,
          t.bins};
}

}  // namespace

std::size_t NeuralTopology::parameter_count() const {
  const Shape s = shape_of(*this);
  return s.conv_w + s.conv_b + s.gru_wx + s.gru_wh + 2 * s.gru_b + 2 * (s.head_w + s.head_b);
}

void NeuralTopology::validate() const {
  if (rows == 0 || cols == 0 || bins == 0 || conv_channels == 0 || hidden == 0)
    throw ConfigError("neural topology: all dimensions must be positive");
  if (conv_kernel == 0 || conv_kernel % 2 == 0) throw ConfigError("neural topology: conv_kernel must be odd");
  if (rows % 3 != 0) throw ConfigError("neural topology: rows must be a multiple of 3 (3 inputs per band)");
}

NeuralWeights NeuralWeights::zeros(const NeuralTopology& t) {
  t.validate();
  const Shape s = shape_of(t);
  NeuralWeights w;
  w.topology = t;
  w.conv_w.assign(s.conv_w, 0.0);
  w.conv_b.assign(s.conv_b, 0.0);
  w.gru_wx.assign(s.gru_wx, 0.0);
  w.gru_wh.assign(s.gru_wh, 0.0);
  w.gru_bx.assign(s.gru_b, 0.0);
  w.gru_bh.assign(s.gru_b, 0.0);
  w.mag_w.assign(s.head_w, 0.0);
  w.mag_b.assign(s.head_b, 0.0);
  w.phase_w.assign(s.head_w, 0.0);
  w.phase_b.assign(s.head_b, 0.0);
  return w;
}

NeuralWeights NeuralWeights::random(const NeuralTopology& t, std::uint64_t seed) {
  NeuralWeights w = zeros(t);
  std::mt19937_64 rng(seed);
  const auto fill = [&](std::vector<double>& v, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    std::uniform_real_distribution<double> dist(-bound, bound);
    // Round through float so in-memory weights equal what save()/load() yield.
    for (auto& x : v) x = static_cast<float>(dist(rng));
  };
  fill(w.conv_w, std::size_t{t.rows} * t.conv_kernel);
  fill(w.conv_b, std::size_t{t.rows} * t.conv_kernel);
  fill(w.gru_wx, t.hidden);
  fill(w.gru_wh, t.hidden);
  fill(w.gru_bx, t.hidden);
  fill(w.gru_bh, t.hidden);
  fill(w.mag_w, t.hidden);
  fill(w.mag_b, t.hidden);
  fill(w.phase_w, t.hidden);
  fill(w.phase_b, t.hidden);
  return w;
}

std::vector<std::span<double>> NeuralWeights::tensors() {
  return {conv_w, conv_b, gru_wx, gru_wh, gru_bx, gru_bh, mag_w, mag_b, phase_w, phase_b};
}

std::vector<std::span<const double>> NeuralWeights::tensors() const {
  return {conv_w, conv_b, gru_wx, gru_wh, gru_bx, gru_bh, mag_w, mag_b, phase_w, phase_b};
}

NeuralWeights NeuralWeights::load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open weights file '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw FormatError("'" + path.string() + "' is not an AENR weights file (bad magic)");
  const unsigned char* p = bytes.data() + 4;
  const std::uint32_t version = read_u32(p);
  if (version != kVersion)
    throw FormatError("unsupported weights version " + std::to_string(version));
  NeuralTopology t;
  t.rows = read_u32(p + 4);
  t.cols = read_u32(p + 8);
  t.bins = read_u32(p + 12);
  t.conv_channels = read_u32(p + 16);
  t.conv_kernel = read_u32(p + 20);
  t.hidden = read_u32(p + 24);
  try {
    t.validate();
  } catch (const ConfigError& e) {
    throw FormatError(std::string("weights header: ") + e.what());
  }
  // Guard against absurd headers before allocating.
  if (t.parameter_count() > (bytes.size() - kHeaderBytes) / 4 + 1)
    throw FormatError("weights file truncated: header declares more parameters than present");
  const std::size_t expected = kHeaderBytes + 4 * t.parameter_count();
  if (bytes.size() != expected)
    throw FormatError("weights file size " + std::to_string(bytes.size()) + " != expected " +
                      std::to_string(expected));

  NeuralWeights w = zeros(t);
  const unsigned char* cur = bytes.data() + kHeaderBytes;
  for (auto tensor : w.tensors()) {
    for (auto& v : tensor) {
      v = static_cast<double>(std::bit_cast<float>(read_u32(cur)));
      if (!std::isfinite(v)) throw FormatError("weights file contains non-finite values");
      cur += 4;
    }
  }
  return w;
}

void NeuralWeights::save(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot write weights file '" + path.string() + "'");
  os.write(kMagic.data(), kMagic.size());
  write_u32(os, kVersion);
  for (std::uint32_t v : {topology.rows, topology.cols, topology.bins, topology.conv_channels,
                          topology.conv_kernel, topology.hidden})
    write_u32(os, v);
  for (auto tensor : tensors())
    for (double v : tensor) write_u32(os, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
  if (!os) throw IoError("short write to '" + path.string() + "'");
}

struct NeuralMaskEstimator::Activations {
  std::vector<double> conv;  // pre-activation [C][cols]
  std::vector<double> u;     // relu(conv)
  std::vector<double> gx, gh;
  std::vector<double> r, z, n, h;
  std::vector<double> mag, phase_tanh;
};

NeuralMaskEstimator::NeuralMaskEstimator(NeuralWeights weights, double ceiling)
    : w_(std::move(weights)), ceiling_(ceiling), h_(w_.topology.hidden, 0.0) {
  w_.topology.validate();
  const NeuralWeights ref = NeuralWeights::zeros(w_.topology);
  const auto mine = w_.tensors();
  const auto want = ref.tensors();
  for (std::size_t i = 0; i < mine.size(); ++i)
    if (mine[i].size() != want[i].size()) throw ConfigError("neural weights: tensor sizes do not match topology");
}

void NeuralMaskEstimator::check_geometry(const SubbandLayout& layout) const {
  const NeuralTopology& t = w_.topology;
  if (t.rows != layout.rows() || t.cols != layout.band_length || t.bins != layout.bins)
    throw ConfigError("neural weights expect a " + std::to_string(t.rows) + "x" + std::to_string(t.cols) +
                      " block over " + std::to_string(t.bins) + " bins, pipeline produces " +
                      std::to_string(layout.rows()) + "x" + std::to_string(layout.band_length) + " over " +
                      std::to_string(layout.bins));
}

void NeuralMaskEstimator::run(const ReorientedFeatureBlock& block, std::span<const double> h_in,
                              Activations& act) const {
  const NeuralTopology& t = w_.topology;
  if (block.rows != t.rows || block.cols != t.cols) throw InvalidArgument("neural: feature block shape mismatch");
  if (h_in.size() != t.hidden) throw InvalidArgument("neural: hidden state size mismatch");
  const std::size_t C = t.conv_channels, R = t.rows, W = t.cols, KW = t.conv_kernel, H = t.hidden;
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(KW / 2);

  act.conv.assign(C * W, 0.0);
  act.u.assign(C * W, 0.0);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t j = 0; j < W; ++j) {
      double acc = w_.conv_b[c];
      for (std::size_t i = 0; i < R; ++i) {
        const double* wk = &w_.conv_w[(c * R + i) * KW];
        const double* x = &block.data[i * W];
        for (std::size_t tap = 0; tap < KW; ++tap) {
          const std::ptrdiff_t col = static_cast<std::ptrdiff_t>(j + tap) - half;
          if (col >= 0 && col < static_cast<std::ptrdiff_t>(W)) acc += wk[tap] * x[col];
        }
      }
      act.conv[c * W + j] = acc;
      act.u[c * W + j] = acc > 0.0 ? acc : 0.0;
    }
  }

  const std::size_t D = t.input_dim();
  act.gx.assign(3 * H, 0.0);
  act.gh.assign(3 * H, 0.0);
  for (std::size_t g = 0; g < 3 * H; ++g) {
    double ax = w_.gru_bx[g];
    const double* wx = &w_.gru_wx[g * D];
    for (std::size_t d = 0; d < D; ++d) ax += wx[d] * act.u[d];
    double ah = w_.gru_bh[g];
    const double* wh = &w_.gru_wh[g * H];
    for (std::size_t d = 0; d < H; ++d) ah += wh[d] * h_in[d];
    act.gx[g] = ax;
    act.gh[g] = ah;
  }
  act.r.resize(H);
  act.z.resize(H);
  act.n.resize(H);
  act.h.resize(H);
  for (std::size_t k = 0; k < H; ++k) {
    act.r[k] = sigmoid(act.gx[k] + act.gh[k]);
    act.z[k] = sigmoid(act.gx[H + k] + act.gh[H + k]);
    act.n[k] = std::tanh(act.gx[2 * H + k] + act.r[k] * act.gh[2 * H + k]);
    act.h[k] = (1.0 - act.z[k]) * act.n[k] + act.z[k] * h_in[k];
  }

  const std::size_t K = t.bins;
  act.mag.resize(K);
  act.phase_tanh.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    double am = w_.mag_b[k];
    double ap = w_.phase_b[k];
    const double* wm = &w_.mag_w[k * H];
    const double* wp = &w_.phase_w[k * H];
    for (std::size_t d = 0; d < H; ++d) {
      am += wm[d] * act.h[d];
      ap += wp[d] * act.h[d];
    }
    act.mag[k] = sigmoid(am);
    act.phase_tanh[k] = std::tanh(ap);
  }
}

ComplexMask NeuralMaskEstimator::forward(const ReorientedFeatureBlock& block, std::span<const double> h_in,
                                         std::vector<double>* h_out) const {
  Activations act;
  run(block, h_in, act);
  ComplexMask m;
  m.magnitude = act.mag;
  m.phase.resize(act.phase_tanh.size());
  for (std::size_t k = 0; k < m.phase.size(); ++k) m.phase[k] = std::numbers::pi * act.phase_tanh[k];
  sanitize(m, ceiling_);
  if (h_out) *h_out = std::move(act.h);
  return m;
}

ComplexMask NeuralMaskEstimator::step(const ReorientedFeatureBlock& block) {
  std::vector<double> next;
  ComplexMask m = forward(block, h_, &next);
  h_ = std::move(next);
  return m;
}

ComplexMask NeuralMaskEstimator::step(const EstimatorInput& in) { return step(in.block); }

void NeuralMaskEstimator::reset() { std::fill(h_.begin(), h_.end(), 0.0); }

NeuralWeights NeuralMaskEstimator::gradient(const ReorientedFeatureBlock& block, std::span<const double> h_in,
                                            std::span<const double> dmag, std::span<const double> dphase) const {
  const NeuralTopology& t = w_.topology;
  if (dmag.size() != t.bins || dphase.size() != t.bins) throw InvalidArgument("gradient: seed length mismatch");
  Activations act;
  run(block, h_in, act);
  const std::size_t C = t.conv_channels, R = t.rows, W = t.cols, KW = t.conv_kernel, H = t.hidden, K = t.bins;
  const std::size_t D = t.input_dim();
  NeuralWeights g = NeuralWeights::zeros(t);

  // Heads.
  std::vector<double> dh(H, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    const double dm = dmag[k] * act.mag[k] * (1.0 - act.mag[k]);
    const double th = act.phase_tanh[k];
    const double dp = dphase[k] * std::numbers::pi * (1.0 - th * th);
    g.mag_b[k] = dm;
    g.phase_b[k] = dp;
    for (std::size_t d = 0; d < H; ++d) {
      g.mag_w[k * H + d] = dm * act.h[d];
      g.phase_w[k * H + d] = dp * act.h[d];
      dh[d] += w_.mag_w[k * H + d] * dm + w_.phase_w[k * H + d] * dp;
    }
  }

  // GRU cell (h_in treated as a constant).
  std::vector<double> dgx(3 * H), dgh(3 * H);
  for (std::size_t k = 0; k < H; ++k) {
    const double dn = dh[k] * (1.0 - act.z[k]);
    const double dz = dh[k] * (h_in[k] - act.n[k]);
    const double dnpre = dn * (1.0 - act.n[k] * act.n[k]);
    const double dr = dnpre * act.gh[2 * H + k];
    const double drpre = dr * act.r[k] * (1.0 - act.r[k]);
    const double dzpre = dz * act.z[k] * (1.0 - act.z[k]);
    dgx[k] = drpre;
    dgh[k] = drpre;
    dgx[H + k] = dzpre;
    dgh[H + k] = dzpre;
    dgx[2 * H + k] = dnpre;
    dgh[2 * H + k] = dnpre * act.r[k];
  }
  std::vector<double> du(D, 0.0);
  for (std::size_t gi = 0; gi < 3 * H; ++gi) {
    g.gru_bx[gi] = dgx[gi];
    g.gru_bh[gi] = dgh[gi];
    for (std::size_t d = 0; d < D; ++d) {
      g.gru_wx[gi * D + d] = dgx[gi] * act.u[d];
      du[d] += w_.gru_wx[gi * D + d] * dgx[gi];
    }
    for (std::size_t d = 0; d < H; ++d) g.gru_wh[gi * H + d] = dgh[gi] * h_in[d];
  }

  // Convolution.
  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(KW / 2);
  for (std::size_t c = 0; c < C; ++c) {
    for (std::size_t j = 0; j < W; ++j) {
      const double da = act.conv[c * W + j] > 0.0 ? du[c * W + j] : 0.0;
      if (da == 0.0) continue;
      g.conv_b[c] += da;
      for (std::size_t i = 0; i < R; ++i) {
        const double* x = &block.data[i * W];
        for (std::size_t tap = 0; tap < KW; ++tap) {
          const std::ptrdiff_t col = static_cast<std::ptrdiff_t>(j + tap) - half;
          if (col >= 0 && col < static_cast<std::ptrdiff_t>(W)) g.conv_w[(c * R + i) * KW + tap] += da * x[col];
        }
      }
    }
  }
  return g;
}

}  // namespace aenr
