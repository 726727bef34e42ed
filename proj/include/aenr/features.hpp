// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "aenr/stft.hpp"

namespace aenr {

// Overlapping sub-band split of a K-bin spectrum.
struct SubbandLayout {
  std::size_t bins = 0;         // K
  std::size_t band_length = 0;  // K_B
  double overlap = 0.0;         // beta
  std::size_t hop_bins = 0;
  std::size_t band_count = 0;   // B
  std::size_t padded_length = 0;
  std::vector<std::size_t> band_starts;

  std::size_t rows() const { return 3 * band_count; }
};

SubbandLayout make_layout(std::size_t bins, std::size_t band_length, double overlap);

// Interleaved stack of compressed sub-bands, row-major (3B x K_B). Row 3b is
// band b of the error signal, 3b+1 of the echo estimate, 3b+2 of the far end.
struct ReorientedFeatureBlock {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::int64_t frame_index = 0;

  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {data.data() + r * cols, cols}; }
};

ReorientedFeatureBlock reorient(std::span<const double> z_mag, std::span<const double> e_mag,
                                std::span<const double> y_mag, const SubbandLayout& layout);

struct FrontendFrame {
  ReorientedFeatureBlock block;
  CompressedFrame error;  // compressed error magnitude + untouched error phase
};

FrontendFrame frontend_frame(const Spectrum& z_spec, const Spectrum& e_spec, const Spectrum& y_spec,
                             double alpha, const SubbandLayout& layout);

}  // namespace aenr
