// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "aenr/features.hpp"
#include "aenr/mask.hpp"

namespace aenr {

// Fixed topology of the reference neural mask estimator:
//
//   block (rows x cols) -> conv1d over columns (conv_channels, conv_kernel,
//   zero "same" padding) -> ReLU -> flatten -> GRU(hidden) ->
//   magnitude head: sigmoid(Wm h + bm)      (bins)
//   phase head:     pi * tanh(Wp h + bp)    (bins)
//
// GRU gates follow the r, z, n convention:
//   r = sig(Wx_r u + bx_r + Wh_r h + bh_r)
//   z = sig(Wx_z u + bx_z + Wh_z h + bh_z)
//   n = tanh(Wx_n u + bx_n + r * (Wh_n h + bh_n))
//   h' = (1 - z) * n + z * h
struct NeuralTopology {
  std::uint32_t rows = 24;
  std::uint32_t cols = 48;
  std::uint32_t bins = 257;
  std::uint32_t conv_channels = 8;
  std::uint32_t conv_kernel = 3;
  std::uint32_t hidden = 64;

  std::size_t input_dim() const { return std::size_t{conv_channels} * cols; }
  std::size_t parameter_count() const;
  void validate() const;
  bool operator==(const NeuralTopology&) const = default;
};

// Parameters in double precision; on disk they are float32.
struct NeuralWeights {
  NeuralTopology topology;
  std::vector<double> conv_w;   // [C][rows][kernel]
  std::vector<double> conv_b;   // [C]
  std::vector<double> gru_wx;   // [3H][C*cols]
  std::vector<double> gru_wh;   // [3H][H]
  std::vector<double> gru_bx;   // [3H]
  std::vector<double> gru_bh;   // [3H]
  std::vector<double> mag_w;    // [bins][H]
  std::vector<double> mag_b;    // [bins]
  std::vector<double> phase_w;  // [bins][H]
  std::vector<double> phase_b;  // [bins]

  static NeuralWeights zeros(const NeuralTopology& t);
  // Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)) per tensor, seeded.
  static NeuralWeights random(const NeuralTopology& t, std::uint64_t seed);
  static NeuralWeights load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;

  // Tensors in file order.
  std::vector<std::span<double>> tensors();
  std::vector<std::span<const double>> tensors() const;
};

class NeuralMaskEstimator final : public MaskEstimator {
 public:
  explicit NeuralMaskEstimator(NeuralWeights weights, double ceiling = 2.0);

  // Throws ConfigError unless the weights match 3B x K_B blocks over K bins.
  void check_geometry(const SubbandLayout& layout) const;

  std::string name() const override { return "neural"; }
  ComplexMask step(const EstimatorInput& in) override;
  ComplexMask step(const ReorientedFeatureBlock& block);
  void reset() override;

  const NeuralWeights& weights() const { return w_; }
  std::span<const double> hidden_state() const { return h_; }

  // One stateless step from a given hidden state.
  ComplexMask forward(const ReorientedFeatureBlock& block, std::span<const double> h_in,
                      std::vector<double>* h_out = nullptr) const;

  // Gradient of L = sum_k dmag[k] * M_m[k] + dphase[k] * M_p[k] for one step
  // from h_in, w.r.t. every parameter (same layout as NeuralWeights).
  NeuralWeights gradient(const ReorientedFeatureBlock& block, std::span<const double> h_in,
                         std::span<const double> dmag, std::span<const double> dphase) const;

 private:
  struct Activations;
  void run(const ReorientedFeatureBlock& block, std::span<const double> h_in, Activations& act) const;

  NeuralWeights w_;
  double ceiling_;
  std::vector<double> h_;
};

}  // namespace aenr
