// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace aenr {

enum class ScenarioKind { kNearEndSingleTalk, kFarEndSingleTalk, kDoubleTalk };

ScenarioKind scenario_kind_from_string(const std::string& s);  // "NST", "FST", "DT"
std::string to_string(ScenarioKind k);

enum class SourceKind { kWhite, kPink, kSpeechShaped, kSpeechLike, kSilence, kWav };

struct SourceSpec {
  SourceKind kind = SourceKind::kSpeechLike;
  std::string wav_path;  // kWav only

  // "white", "pink", "speech_shaped", "speech_like", "silence", "wav:<path>"
  static SourceSpec parse(const std::string& s);
  std::string to_string() const;
};

// Slopes of the synthetic noise families in dB per octave.
inline constexpr double kPinkSlopeDb = -3.0;
inline constexpr double kSpeechShapedSlopeDb = -6.0;
// Below this frequency shaped noise is flat.
inline constexpr double kShapedCornerHz = 100.0;

std::vector<double> white_noise(std::size_t n, std::uint64_t seed);
// Gaussian noise with a power spectrum tilted by slope_db per octave above
// kShapedCornerHz, normalized to unit RMS.
std::vector<double> shaped_noise(std::size_t n, double slope_db_per_octave, double sample_rate, std::uint64_t seed);
// Syllable-like sequence of voiced harmonic segments, unvoiced speech-shaped
// bursts and pauses, normalized to unit active RMS.
std::vector<double> speech_like(std::size_t n, double sample_rate, std::uint64_t seed);
// Deterministic given (kind, n, rate, seed). kWav reads and truncates/loops.
std::vector<double> make_source(const SourceSpec& spec, std::size_t n, double sample_rate, std::uint64_t seed);

struct EchoPath {
  std::vector<double> taps;
  std::size_t delay = 0;  // bulk delay in samples
};

// Exponentially decaying random FIR: 60 dB decay over rt60_s.
struct EchoPathParams {
  std::size_t taps = 512;
  double rt60_s = 0.05;
  std::size_t delay = 0;
};

inline constexpr double kMaxBulkDelaySeconds = 1.5;

EchoPath make_echo_path(const EchoPathParams& p, double sample_rate, std::uint64_t seed);

// echo = path * clip(farend), delayed by path.delay, same length as farend.
std::vector<double> render_echo(std::span<const double> farend, const EchoPath& path,
                                std::optional<double> clip_level = std::nullopt);

// Mean power over active 20 ms frames (energy within 40 dB of the loudest
// frame). Returns 0 for an all-zero signal.
double active_power(std::span<const double> x, double sample_rate);

struct ScenarioSpec {
  ScenarioKind kind = ScenarioKind::kDoubleTalk;
  double ser_db = 0.0;
  double snr_db = 10.0;
  EchoPathParams path;
  std::optional<double> clip_level;
  double duration_s = 10.0;
  std::uint64_t seed = 1;
  double sample_rate = 16000.0;
  // Active level of the reference component (near end, or echo for FST).
  double level_dbfs = -25.0;
  SourceSpec near{SourceKind::kSpeechLike, {}};
  SourceSpec noise{SourceKind::kPink, {}};
  SourceSpec farend{SourceKind::kSpeechLike, {}};

  std::size_t samples() const;
  // Throws ConfigError on out-of-range fields.
  void validate() const;
};

struct ScenarioTruth {
  std::vector<double> mic;
  std::vector<double> near;
  std::vector<double> echo;
  std::vector<double> noise;
  std::vector<double> farend;
  double sample_rate = 16000.0;
  std::size_t size() const { return mic.size(); }
};

// Scales and sums the components: SER and SNR hold on active-frame powers,
// mic = near + echo + noise.
ScenarioTruth mix(const ScenarioSpec& spec, std::span<const double> near, std::span<const double> noise,
                  std::span<const double> farend);

// Sources + echo path + mix from a spec alone.
ScenarioTruth generate(const ScenarioSpec& spec);

}  // namespace aenr
