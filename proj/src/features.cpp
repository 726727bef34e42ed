// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/features.hpp"

#include <cmath>
#include <string>

#include "aenr/error.hpp"

namespace aenr {

SubbandLayout make_layout(std::size_t bins, std::size_t band_length, double overlap) {
  if (!(overlap >= 0.0 && overlap < 1.0)) throw InvalidArgument("make_layout: overlap must be in [0, 1)");
  if (band_length < 1 || band_length > bins)
    throw InvalidArgument("make_layout: band_length must be in [1, bins]");
  const auto hop = static_cast<std::size_t>(std::lround(static_cast<double>(band_length) * (1.0 - overlap)));
  if (hop < 1) throw InvalidArgument("make_layout: band hop rounds to zero");

  SubbandLayout l;
  l.bins = bins;
  l.band_length = band_length;
  l.overlap = overlap;
  l.hop_bins = hop;
  l.band_count = 1;
  if (bins > band_length) l.band_count += (bins - band_length + hop - 1) / hop;
  l.padded_length = (l.band_count - 1) * hop + band_length;
  l.band_starts.resize(l.band_count);
  for (std::size_t b = 0; b < l.band_count; ++b) l.band_starts[b] = b * hop;
  return l;
}

ReorientedFeatureBlock reorient(std::span<const double> z_mag, std::span<const double> e_mag,
                                std::span<const double> y_mag, const SubbandLayout& layout) {
  const std::size_t K = layout.bins;
  if (z_mag.size() != K || e_mag.size() != K || y_mag.size() != K)
    throw InvalidArgument("reorient: inputs must have " + std::to_string(K) + " bins");
  ReorientedFeatureBlock blk;
  blk.rows = layout.rows();
  blk.cols = layout.band_length;
  blk.data.assign(blk.rows * blk.cols, 0.0);
  const std::span<const double> channels[3] = {z_mag, e_mag, y_mag};
  for (std::size_t b = 0; b < layout.band_count; ++b) {
    const std::size_t start = layout.band_starts[b];
    for (std::size_t c = 0; c < 3; ++c) {
      double* row = blk.data.data() + (3 * b + c) * blk.cols;
      for (std::size_t j = 0; j < blk.cols && start + j < K; ++j) row[j] = channels[c][start + j];
    }
  }
  return blk;
}

FrontendFrame frontend_frame(const Spectrum& z_spec, const Spectrum& e_spec, const Spectrum& y_spec,
                             double alpha, const SubbandLayout& layout) {
  FrontendFrame out;
  out.error = compress(z_spec, alpha);
  const CompressedFrame e = compress(e_spec, alpha);
  const CompressedFrame y = compress(y_spec, alpha);
  out.block = reorient(out.error.magnitude, e.magnitude, y.magnitude, layout);
  out.block.frame_index = z_spec.frame_index;
  return out;
}

}  // namespace aenr
