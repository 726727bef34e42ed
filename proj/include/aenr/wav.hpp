// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <vector>

namespace aenr {

struct Audio {
  std::vector<double> samples;  // mono, nominal range [-1, 1]
  double sample_rate = 16000.0;
};

enum class WavEncoding { kPcm16, kFloat32 };

// Reads mono 16-bit PCM or 32-bit float RIFF/WAVE. Throws IoError when the
// file cannot be opened and FormatError for anything else it cannot decode.
Audio read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const Audio& audio, WavEncoding enc = WavEncoding::kFloat32);

}  // namespace aenr
