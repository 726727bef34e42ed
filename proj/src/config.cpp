// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "aenr/error.hpp"
#include "aenr/features.hpp"

namespace aenr {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& source, int line, const std::string& msg) {
  throw ConfigError(source + ":" + std::to_string(line) + ": " + msg);
}

double as_double(const KeyValue& kv, const std::string& source) {
  double v = 0.0;
  const char* first = kv.value.data();
  const char* last = first + kv.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) fail(source, kv.line, "'" + kv.key + "' expects a number, got '" + kv.value + "'");
  return v;
}

std::uint64_t as_uint(const KeyValue& kv, const std::string& source) {
  std::uint64_t v = 0;
  const char* first = kv.value.data();
  const char* last = first + kv.value.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last)
    fail(source, kv.line, "'" + kv.key + "' expects a non-negative integer, got '" + kv.value + "'");
  return v;
}

bool as_bool(const KeyValue& kv, const std::string& source) {
  if (kv.value == "true" || kv.value == "1" || kv.value == "on") return true;
  if (kv.value == "false" || kv.value == "0" || kv.value == "off") return false;
  fail(source, kv.line, "'" + kv.key + "' expects true/false, got '" + kv.value + "'");
}

using Setter = std::function<void(const KeyValue&)>;

// Shortest text that parses back to the same double.
struct Num {
  double v;
};

std::ostream& operator<<(std::ostream& os, Num n) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, n.v);
  return os.write(buf, end - buf);
}

void apply(const std::vector<KeyValue>& kvs, const std::map<std::string, Setter>& setters, const std::string& source) {
  for (const auto& kv : kvs) {
    const auto it = setters.find(kv.key);
    if (it == setters.end()) fail(source, kv.line, "unknown key '" + kv.key + "'");
    try {
      it->second(kv);
    } catch (const InvalidArgument& e) {
      fail(source, kv.line, e.what());
    }
  }
}

}  // namespace

std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& source) {
  std::vector<KeyValue> out;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  std::map<std::string, int> seen;
  while (std::getline(is, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) fail(source, line, "expected 'key = value'");
    KeyValue kv{trim(body.substr(0, eq)), trim(body.substr(eq + 1)), line};
    if (kv.key.empty()) fail(source, line, "empty key");
    if (kv.value.empty()) fail(source, line, "empty value for '" + kv.key + "'");
    if (auto [it, fresh] = seen.emplace(kv.key, line); !fresh)
      fail(source, line, "duplicate key '" + kv.key + "' (first set on line " + std::to_string(it->second) + ")");
    out.push_back(std::move(kv));
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void PipelineConfig::validate() {
  try {
    stft.validate();
    kalman.fft_order = stft.fft_order;
    kalman.hop = stft.hop;
    kalman.validate();
    if (!(alpha > 0.0 && alpha <= 1.0)) throw InvalidArgument("features.alpha must be in (0, 1]");
    make_layout(stft.bins(), band_length, band_overlap);
    if (!(mask.ceiling > 0.0)) throw InvalidArgument("mask.ceiling must be positive");
    if (!(mask.gain_floor >= 0.0 && mask.gain_floor <= mask.ceiling))
      throw InvalidArgument("mask.gain_floor must be in [0, mask.ceiling]");
    if (!(wiener.echo_leak >= 0.0)) throw InvalidArgument("wiener.echo_leak must be >= 0");
    if (!(wiener.smoothing >= 0.0 && wiener.smoothing < 1.0)) throw InvalidArgument("wiener.smoothing must be in [0, 1)");
    if (wiener.noise_window < 1) throw InvalidArgument("wiener.noise_window must be >= 1");
    if (!(wiener.noise_bias > 0.0)) throw InvalidArgument("wiener.noise_bias must be positive");
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("invalid pipeline config: ") + e.what());
  }
}

PipelineConfig PipelineConfig::parse(const std::string& text, const std::string& source) {
  PipelineConfig c;
  const auto d = [&](double& dst) { return [&dst, &source](const KeyValue& kv) { dst = as_double(kv, source); }; };
  const auto u = [&](std::size_t& dst) {
    return [&dst, &source](const KeyValue& kv) { dst = static_cast<std::size_t>(as_uint(kv, source)); };
  };
  const std::map<std::string, Setter> setters = {
      {"stft.fft_order", u(c.stft.fft_order)},
      {"stft.hop", u(c.stft.hop)},
      {"stft.window", [&](const KeyValue& kv) { c.stft.window = window_from_string(kv.value); }},
      {"stft.sample_rate", d(c.stft.sample_rate)},
      {"kalman.partitions", u(c.kalman.partitions)},
      {"kalman.smoothing", d(c.kalman.smoothing)},
      {"kalman.forgetting", d(c.kalman.forgetting)},
      {"kalman.regularization", d(c.kalman.regularization)},
      {"kalman.initial_covariance", d(c.kalman.initial_covariance)},
      {"kalman.gradient_constraint", [&](const KeyValue& kv) { c.kalman.gradient_constraint = as_bool(kv, source); }},
      {"features.alpha", d(c.alpha)},
      {"features.band_length", u(c.band_length)},
      {"features.band_overlap", d(c.band_overlap)},
      {"mask.ceiling", d(c.mask.ceiling)},
      {"mask.gain_floor", d(c.mask.gain_floor)},
      {"wiener.echo_leak", d(c.wiener.echo_leak)},
      {"wiener.smoothing", d(c.wiener.smoothing)},
      {"wiener.noise_window", u(c.wiener.noise_window)},
      {"wiener.noise_spread", u(c.wiener.noise_spread)},
      {"wiener.noise_bias", d(c.wiener.noise_bias)},
      {"estimator", [&](const KeyValue& kv) { c.estimator = kv.value; }},
  };
  apply(parse_key_values(text, source), setters, source);
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

PipelineConfig PipelineConfig::load(const std::filesystem::path& path) {
  return parse(read_text_file(path), path.string());
}

std::string PipelineConfig::to_text() const {
  std::ostringstream os;
  os << "stft.fft_order = " << stft.fft_order << "\n"
     << "stft.hop = " << stft.hop << "\n"
     << "stft.window = " << to_string(stft.window) << "\n"
     << "stft.sample_rate = " << Num{stft.sample_rate} << "\n"
     << "kalman.partitions = " << kalman.partitions << "\n"
     << "kalman.smoothing = " << Num{kalman.smoothing} << "\n"
     << "kalman.forgetting = " << Num{kalman.forgetting} << "\n"
     << "kalman.regularization = " << Num{kalman.regularization} << "\n"
     << "kalman.initial_covariance = " << Num{kalman.initial_covariance} << "\n"
     << "kalman.gradient_constraint = " << (kalman.gradient_constraint ? "true" : "false") << "\n"
     << "features.alpha = " << Num{alpha} << "\n"
     << "features.band_length = " << band_length << "\n"
     << "features.band_overlap = " << Num{band_overlap} << "\n"
     << "mask.ceiling = " << Num{mask.ceiling} << "\n"
     << "mask.gain_floor = " << Num{mask.gain_floor} << "\n"
     << "wiener.echo_leak = " << Num{wiener.echo_leak} << "\n"
     << "wiener.smoothing = " << Num{wiener.smoothing} << "\n"
     << "wiener.noise_window = " << wiener.noise_window << "\n"
     << "wiener.noise_spread = " << wiener.noise_spread << "\n"
     << "wiener.noise_bias = " << Num{wiener.noise_bias} << "\n"
     << "estimator = " << estimator << "\n";
  return os.str();
}

ScenarioSpec parse_scenario(const std::string& text, const std::string& source) {
  ScenarioSpec s;
  const auto d = [&](double& dst) { return [&dst, &source](const KeyValue& kv) { dst = as_double(kv, source); }; };
  const auto src = [&](SourceSpec& dst) {
    return [&dst, &source](const KeyValue& kv) {
      try {
        dst = SourceSpec::parse(kv.value);
      } catch (const ConfigError& e) {
        fail(source, kv.line, e.what());
      }
    };
  };
  const std::map<std::string, Setter> setters = {
      {"kind",
       [&](const KeyValue& kv) {
         try {
           s.kind = scenario_kind_from_string(kv.value);
         } catch (const ConfigError& e) {
           fail(source, kv.line, e.what());
         }
       }},
      {"ser_db", d(s.ser_db)},
      {"snr_db", d(s.snr_db)},
      {"duration_s", d(s.duration_s)},
      {"seed", [&](const KeyValue& kv) { s.seed = as_uint(kv, source); }},
      {"sample_rate", d(s.sample_rate)},
      {"level_dbfs", d(s.level_dbfs)},
      {"clip_level", [&](const KeyValue& kv) { s.clip_level = as_double(kv, source); }},
      {"path.taps", [&](const KeyValue& kv) { s.path.taps = static_cast<std::size_t>(as_uint(kv, source)); }},
      {"path.rt60_s", d(s.path.rt60_s)},
      {"path.delay", [&](const KeyValue& kv) { s.path.delay = static_cast<std::size_t>(as_uint(kv, source)); }},
      {"near", src(s.near)},
      {"noise", src(s.noise)},
      {"farend", src(s.farend)},
  };
  apply(parse_key_values(text, source), setters, source);
  try {
    s.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return s;
}

ScenarioSpec load_scenario(const std::filesystem::path& path) {
  return parse_scenario(read_text_file(path), path.string());
}

std::string to_text(const ScenarioSpec& s) {
  std::ostringstream os;
  os << "kind = " << to_string(s.kind) << "\n"
     << "ser_db = " << Num{s.ser_db} << "\n"
     << "snr_db = " << Num{s.snr_db} << "\n"
     << "duration_s = " << Num{s.duration_s} << "\n"
     << "seed = " << s.seed << "\n"
     << "sample_rate = " << Num{s.sample_rate} << "\n"
     << "level_dbfs = " << Num{s.level_dbfs} << "\n";
  if (s.clip_level) os << "clip_level = " << Num{*s.clip_level} << "\n";
  os << "path.taps = " << s.path.taps << "\n"
     << "path.rt60_s = " << Num{s.path.rt60_s} << "\n"
     << "path.delay = " << s.path.delay << "\n"
     << "near = " << s.near.to_string() << "\n"
     << "noise = " << s.noise.to_string() << "\n"
     << "farend = " << s.farend.to_string() << "\n";
  return os.str();
}

}  // namespace aenr
