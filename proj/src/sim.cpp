// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/sim.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "aenr/error.hpp"
#include "aenr/fft.hpp"
#include "aenr/wav.hpp"

namespace aenr {

ScenarioKind scenario_kind_from_string(const std::string& s) {
  if (s == "NST" || s == "nst") return ScenarioKind::kNearEndSingleTalk;
  if (s == "FST" || s == "fst") return ScenarioKind::kFarEndSingleTalk;
  if (s == "DT" || s == "dt") return ScenarioKind::kDoubleTalk;
  throw ConfigError("unknown scenario kind '" + s + "' (expected NST, FST or DT)");
}

std::string to_string(ScenarioKind k) {
  switch (k) {
    case ScenarioKind::kNearEndSingleTalk: return "NST";
    case ScenarioKind::kFarEndSingleTalk: return "FST";
    case ScenarioKind::kDoubleTalk: return "DT";
  }
  return "?";
}

SourceSpec SourceSpec::parse(const std::string& s) {
  if (s == "white") return {SourceKind::kWhite, {}};
  if (s == "pink") return {SourceKind::kPink, {}};
  if (s == "speech_shaped") return {SourceKind::kSpeechShaped, {}};
  if (s == "speech_like") return {SourceKind::kSpeechLike, {}};
  if (s == "silence") return {SourceKind::kSilence, {}};
  if (s.rfind("wav:", 0) == 0 && s.size() > 4) return {SourceKind::kWav, s.substr(4)};
  throw ConfigError("unknown source '" + s + "'");
}

std::string SourceSpec::to_string() const {
  switch (kind) {
    case SourceKind::kWhite: return "white";
    case SourceKind::kPink: return "pink";
    case SourceKind::kSpeechShaped: return "speech_shaped";
    case SourceKind::kSpeechLike: return "speech_like";
    case SourceKind::kSilence: return "silence";
    case SourceKind::kWav: return "wav:" + wav_path;
  }
  return "?";
}

namespace {

std::size_t next_pow2(std::size_t n) {
  std::size_t m = 2;
  while (m < n) m <<= 1;
  return m;
}

void normalize_rms(std::vector<double>& x) {
  double p = 0.0;
  for (double v : x) p += v * v;
  if (p <= 0.0) return;
  const double g = 1.0 / std::sqrt(p / static_cast<double>(x.size()));
  for (double& v : x) v *= g;
}

}  // namespace

std::vector<double> white_noise(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> dist(0.0, 1.0);
  std::vector<double> out(n);
  for (double& v : out) v = dist(rng);
  return out;
}

std::vector<double> shaped_noise(std::size_t n, double slope_db_per_octave, double sample_rate, std::uint64_t seed) {
  if (n == 0) return {};
  const std::size_t m = next_pow2(n);
  std::vector<double> x = white_noise(m, seed);
  RealFft fft(m);
  std::vector<Complex> spec(fft.bins());
  fft.forward(x, spec);
  // Power slope s dB/octave -> amplitude exponent s / (20 log10 2).
  const double exponent = slope_db_per_octave / (20.0 * std::log10(2.0));
  for (std::size_t k = 0; k < spec.size(); ++k) {
    const double f = sample_rate * static_cast<double>(k) / static_cast<double>(m);
    spec[k] *= std::pow(std::max(f, kShapedCornerHz) / kShapedCornerHz, exponent);
  }
  spec[0] = 0.0;
  fft.inverse(spec, x);
  x.resize(n);
  normalize_rms(x);
  return x;
}

std::vector<double> speech_like(std::size_t n, double sample_rate, std::uint64_t seed) {
  std::vector<double> out(n, 0.0);
  if (n == 0) return out;
  const std::vector<double> unvoiced = shaped_noise(n, kSpeechShapedSlopeDb, sample_rate, seed ^ 0x5bd1e995u);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  const double ramp = 0.01 * sample_rate;
  double phase = 0.0;
  std::size_t pos = 0;
  while (pos < n) {
    const double kind = u01(rng);
    const auto len = static_cast<std::size_t>(sample_rate * (kind < 0.3 ? 0.1 + 0.3 * u01(rng) : 0.08 + 0.17 * u01(rng)));
    const std::size_t end = std::min(n, pos + std::max<std::size_t>(len, 1));
    const double seg = static_cast<double>(end - pos);
    if (kind >= 0.3) {
      const bool voiced = kind >= 0.5;
      const double f0 = 100.0 + 120.0 * u01(rng);
      const double glide = (u01(rng) - 0.5) * 0.3;  // relative f0 change over the segment
      const double gain = 0.5 + u01(rng);
      const int harmonics = static_cast<int>(std::min(4000.0 / f0, 40.0));
      for (std::size_t i = pos; i < end; ++i) {
        const double t = static_cast<double>(i - pos);
        const double env = std::min({1.0, t / ramp, (seg - t) / ramp});
        const double w = std::sin(0.5 * std::numbers::pi * std::max(0.0, env));
        double v;
        if (voiced) {
          const double f = f0 * (1.0 + glide * t / seg);
          phase += 2.0 * std::numbers::pi * f / sample_rate;
          v = 0.0;
          for (int h = 1; h <= harmonics; ++h) v += std::sin(h * phase) / h;
          v *= 0.5;
        } else {
          v = 0.5 * unvoiced[i];
        }
        out[i] = gain * w * w * v;
      }
    }
    pos = end;
  }
  const double p = active_power(out, sample_rate);
  if (p > 0.0)
    for (double& v : out) v /= std::sqrt(p);
  return out;
}

std::vector<double> make_source(const SourceSpec& spec, std::size_t n, double sample_rate, std::uint64_t seed) {
  switch (spec.kind) {
    case SourceKind::kWhite: {
      auto x = white_noise(n, seed);
      normalize_rms(x);
      return x;
    }
    case SourceKind::kPink: return shaped_noise(n, kPinkSlopeDb, sample_rate, seed);
    case SourceKind::kSpeechShaped: return shaped_noise(n, kSpeechShapedSlopeDb, sample_rate, seed);
    case SourceKind::kSpeechLike: return speech_like(n, sample_rate, seed);
    case SourceKind::kSilence: return std::vector<double>(n, 0.0);
    case SourceKind::kWav: {
      const Audio a = read_wav(spec.wav_path);
      if (std::lround(a.sample_rate) != std::lround(sample_rate))
        throw ConfigError("source '" + spec.wav_path + "' has sample rate " + std::to_string(a.sample_rate));
      if (a.samples.empty()) throw ConfigError("source '" + spec.wav_path + "' is empty");
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) out[i] = a.samples[i % a.samples.size()];
      return out;
    }
  }
  return {};
}

EchoPath make_echo_path(const EchoPathParams& p, double sample_rate, std::uint64_t seed) {
  if (p.taps == 0) throw ConfigError("echo path needs at least one tap");
  if (!(p.rt60_s > 0.0)) throw ConfigError("echo path rt60 must be positive");
  EchoPath path;
  path.delay = p.delay;
  path.taps = white_noise(p.taps, seed ^ 0x9e3779b97f4a7c15ull);
  // 60 dB amplitude decay after rt60 seconds.
  const double decay = std::log(1000.0) / (p.rt60_s * sample_rate);
  double energy = 0.0;
  for (std::size_t i = 0; i < p.taps; ++i) {
    path.taps[i] *= std::exp(-decay * static_cast<double>(i));
    energy += path.taps[i] * path.taps[i];
  }
  const double g = 1.0 / std::sqrt(energy);
  for (double& t : path.taps) t *= g;
  return path;
}

std::vector<double> render_echo(std::span<const double> farend, const EchoPath& path,
                                std::optional<double> clip_level) {
  if (path.taps.empty()) throw InvalidArgument("render_echo: empty echo path");
  const std::size_t n = farend.size();
  std::vector<double> out(n, 0.0);
  if (n == 0 || path.delay >= n) return out;

  std::vector<double> src(farend.begin(), farend.end());
  if (clip_level) {
    const double c = std::abs(*clip_level);
    for (double& v : src) v = std::clamp(v, -c, c);
  }

  // FFT overlap-add.
  const std::size_t L = path.taps.size();
  const std::size_t m = next_pow2(2 * L);
  const std::size_t block = m - L + 1;
  RealFft fft(m);
  std::vector<double> buf(m, 0.0);
  std::vector<Complex> h(fft.bins()), x(fft.bins());
  std::copy(path.taps.begin(), path.taps.end(), buf.begin());
  fft.forward(buf, h);
  const std::size_t span_out = n - path.delay;  // output samples still needed
  std::vector<double> acc(span_out + m, 0.0);
  for (std::size_t start = 0; start < span_out; start += block) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const std::size_t len = std::min(block, span_out - start);
    std::copy_n(src.begin() + static_cast<std::ptrdiff_t>(start), len, buf.begin());
    fft.forward(buf, x);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= h[k];
    fft.inverse(x, buf);
    for (std::size_t i = 0; i < m; ++i) acc[start + i] += buf[i];
  }
  std::copy_n(acc.begin(), span_out, out.begin() + static_cast<std::ptrdiff_t>(path.delay));
  return out;
}

double active_power(std::span<const double> x, double sample_rate) {
  const auto frame = std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(0.02 * sample_rate)));
  std::vector<double> energy;
  for (std::size_t s = 0; s < x.size(); s += frame) {
    double e = 0.0;
    const std::size_t end = std::min(x.size(), s + frame);
    for (std::size_t i = s; i < end; ++i) e += x[i] * x[i];
    energy.push_back(e / static_cast<double>(end - s));
  }
  if (energy.empty()) return 0.0;
  const double peak = *std::max_element(energy.begin(), energy.end());
  if (peak <= 0.0) return 0.0;
  const double threshold = peak * 1e-4;
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < energy.size(); ++f) {
    if (energy[f] < threshold) continue;
    const std::size_t s = f * frame;
    const std::size_t end = std::min(x.size(), s + frame);
    for (std::size_t i = s; i < end; ++i) sum += x[i] * x[i];
    count += end - s;
  }
  return count ? sum / static_cast<double>(count) : 0.0;
}

std::size_t ScenarioSpec::samples() const {
  return static_cast<std::size_t>(std::llround(duration_s * sample_rate));
}

void ScenarioSpec::validate() const {
  if (!(duration_s > 0.0)) throw ConfigError("duration_s must be positive");
  if (!(sample_rate > 0.0)) throw ConfigError("sample_rate must be positive");
  if (kind != ScenarioKind::kNearEndSingleTalk && !(ser_db >= -20.0 && ser_db <= 20.0))
    throw ConfigError("ser_db must be in [-20, 20]");
  if (!(snr_db >= -5.0 && snr_db <= 30.0)) throw ConfigError("snr_db must be in [-5, 30]");
  if (static_cast<double>(path.delay) > kMaxBulkDelaySeconds * sample_rate)
    throw ConfigError("path.delay exceeds the 1.5 s bulk delay cap");
  if (path.taps == 0) throw ConfigError("path.taps must be >= 1");
  if (!(path.rt60_s > 0.0)) throw ConfigError("path.rt60_s must be positive");
  if (clip_level && !(*clip_level > 0.0)) throw ConfigError("clip_level must be positive");
}

namespace {

std::vector<double> scaled(std::span<const double> x, std::size_t n, double gain) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = gain * x[i];
  return out;
}

double require_power(std::span<const double> x, double fs, const char* what) {
  const double p = active_power(x, fs);
  if (!(p > 0.0)) throw InvalidArgument(std::string("mix: ") + what + " is silent but must be power-scaled");
  return p;
}

}  // namespace

ScenarioTruth mix(const ScenarioSpec& spec, std::span<const double> near, std::span<const double> noise,
                  std::span<const double> farend) {
  spec.validate();
  const std::size_t n = spec.samples();
  const double fs = spec.sample_rate;
  if (near.size() < n || noise.size() < n || farend.size() < n)
    throw InvalidArgument("mix: sources shorter than the scenario duration");
  const double target = std::pow(10.0, spec.level_dbfs / 10.0);
  const double noise_ratio = std::pow(10.0, -spec.snr_db / 10.0);

  ScenarioTruth t;
  t.sample_rate = fs;
  const std::span<const double> noise_n = noise.first(n);

  switch (spec.kind) {
    case ScenarioKind::kNearEndSingleTalk: {
      const std::span<const double> s = near.first(n);
      t.near = scaled(s, n, std::sqrt(target / require_power(s, fs, "near-end source")));
      t.echo.assign(n, 0.0);
      t.farend.assign(n, 0.0);
      t.noise = scaled(noise_n, n, std::sqrt(target * noise_ratio / require_power(noise_n, fs, "noise source")));
      break;
    }
    case ScenarioKind::kFarEndSingleTalk:
    case ScenarioKind::kDoubleTalk: {
      t.farend.assign(farend.begin(), farend.begin() + static_cast<std::ptrdiff_t>(n));
      const EchoPath path = make_echo_path(spec.path, fs, spec.seed);
      const std::vector<double> raw_echo = render_echo(t.farend, path, spec.clip_level);
      const double pe = require_power(raw_echo, fs, "echo");
      double reference;
      if (spec.kind == ScenarioKind::kDoubleTalk) {
        const std::span<const double> s = near.first(n);
        t.near = scaled(s, n, std::sqrt(target / require_power(s, fs, "near-end source")));
        reference = target;
        const double echo_target = target * std::pow(10.0, -spec.ser_db / 10.0);
        t.echo = scaled(raw_echo, n, std::sqrt(echo_target / pe));
      } else {
        t.near.assign(n, 0.0);
        t.echo = scaled(raw_echo, n, std::sqrt(target / pe));
        reference = target;
      }
      // Far end carries the same gain as the echo so the path stays unit-energy scaled.
      const double far_gain = std::sqrt((spec.kind == ScenarioKind::kDoubleTalk
                                             ? target * std::pow(10.0, -spec.ser_db / 10.0)
                                             : target) / pe);
      for (double& v : t.farend) v *= far_gain;
      t.noise = scaled(noise_n, n, std::sqrt(reference * noise_ratio / require_power(noise_n, fs, "noise source")));
      break;
    }
  }
  t.mic.resize(n);
  for (std::size_t i = 0; i < n; ++i) t.mic[i] = t.near[i] + t.echo[i] + t.noise[i];
  return t;
}

ScenarioTruth generate(const ScenarioSpec& spec) {
  spec.validate();
  const std::size_t n = spec.samples();
  const double fs = spec.sample_rate;
  const auto near = make_source(spec.near, n, fs, spec.seed * 3 + 1);
  const auto noise = make_source(spec.noise, n, fs, spec.seed * 3 + 2);
  const auto farend = make_source(spec.farend, n, fs, spec.seed * 3 + 3);
  return mix(spec, near, noise, farend);
}

}  // namespace aenr
