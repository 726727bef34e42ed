// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Command-line front end. Talks to the engine only through aenr.h.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "aenr/aenr.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitConfig = 2;
constexpr int kExitIo = 3;
constexpr const char* kConfigEnv = "AENR_CONFIG";

int exit_code(aenr_status s) {
  switch (s) {
    case AENR_OK: return kExitOk;
    case AENR_ERR_IO: return kExitIo;
    case AENR_ERR_INTERNAL: return kExitInternal;
    default: return kExitConfig;
  }
}

struct CliError {
  int code;
};

void check(aenr_status s, const std::string& what) {
  if (s == AENR_OK) return;
  std::fprintf(stderr, "aenr: %s: %s (%s)\n", what.c_str(), aenr_last_error(), aenr_status_string(s));
  throw CliError{exit_code(s)};
}

[[noreturn]] void die(int code, const std::string& msg) {
  std::fprintf(stderr, "aenr: %s\n", msg.c_str());
  throw CliError{code};
}

template <typename T, void (*Destroy)(T*)>
struct Handle {
  T* p = nullptr;
  Handle() = default;
  Handle(const Handle&) = delete;
  Handle& operator=(const Handle&) = delete;
  ~Handle() {
    if (p) Destroy(p);
  }
  T** out() { return &p; }
  T* get() const { return p; }
};

using Config = Handle<aenr_config, aenr_config_destroy>;
using Pipeline = Handle<aenr_pipeline, aenr_pipeline_destroy>;
using Audio = Handle<aenr_audio, aenr_audio_destroy>;

void load_config(Config& cfg, const std::string& explicit_path) {
  std::string path = explicit_path;
  if (path.empty()) {
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  }
  if (path.empty()) {
    check(aenr_config_create_default(cfg.out()), "default config");
  } else {
    check(aenr_config_load(path.c_str(), cfg.out()), "config '" + path + "'");
  }
}

std::vector<double> read_mono(const std::string& path, double expected_rate) {
  Audio a;
  check(aenr_audio_read_wav(path.c_str(), a.out()), "read '" + path + "'");
  const double rate = aenr_audio_sample_rate(a.get());
  if (rate != expected_rate)
    die(kExitConfig, "'" + path + "': sample rate " + std::to_string(static_cast<long>(rate)) + " Hz, expected " +
                         std::to_string(static_cast<long>(expected_rate)));
  const double* d = aenr_audio_data(a.get());
  return std::vector<double>(d, d + aenr_audio_length(a.get()));
}

struct ProcessArgs {
  std::string mic, farend, out, config, estimator, metrics, near, kf_diag;
  int verbose = 0;
};

struct Progress {
  double fs = 16000.0;
  size_t hop = 256;
  size_t frames_per_second = 1;
  double mic = 0.0, err = 0.0, out = 0.0;
  size_t count = 0;
};

void progress_cb(const aenr_frame_stats* s, void* user) {
  auto* p = static_cast<Progress*>(user);
  p->mic += s->mic_power;
  p->err += s->error_power;
  p->out += s->output_power;
  if (++p->count < p->frames_per_second) return;
  const auto db = [](double x) { return 10.0 * std::log10(std::max(x, 1e-12)); };
  std::fprintf(stderr, "[%7.2f s] mic %7.2f dB  error %7.2f dB  out %7.2f dB  |w|^2 %.4g\n",
               static_cast<double>((s->frame + 1) * p->hop) / p->fs, db(p->mic / p->count), db(p->err / p->count),
               db(p->out / p->count), s->coefficient_energy);
  p->mic = p->err = p->out = 0.0;
  p->count = 0;
}

void write_metric(std::ofstream& os, const std::string& scenario, const std::string& est, const char* name,
                  double v) {
  char buf[64];
  if (std::isfinite(v))
    std::snprintf(buf, sizeof buf, "%.6f", v);
  else
    std::snprintf(buf, sizeof buf, "nan");
  os << scenario << ',' << est << ',' << name << ',' << buf << '\n';
}

int cmd_process(const ProcessArgs& a) {
  Config cfg;
  load_config(cfg, a.config);
  if (!a.estimator.empty()) check(aenr_config_set_estimator(cfg.get(), a.estimator.c_str()), "estimator");
  const double fs = aenr_config_sample_rate(cfg.get());

  std::vector<double> mic = read_mono(a.mic, fs);
  std::vector<double> far = read_mono(a.farend, fs);
  std::vector<double> near;
  if (!a.near.empty()) near = read_mono(a.near, fs);
  if (mic.empty() || far.empty()) die(kExitConfig, "zero-length input");
  if (mic.size() != far.size()) {
    std::fprintf(stderr, "aenr: warning: mic has %zu samples, farend %zu; zero-padding the shorter\n", mic.size(),
                 far.size());
    const size_t n = std::max(mic.size(), far.size());
    mic.resize(n, 0.0);
    far.resize(n, 0.0);
  }
  if (!near.empty()) near.resize(mic.size(), 0.0);

  Pipeline p;
  check(aenr_pipeline_create(cfg.get(), near.empty() ? nullptr : near.data(), near.size(), p.out()), "pipeline");
  std::fprintf(stderr, "aenr: estimator %s, algorithmic latency %zu samples (%.2f ms), output compensated\n",
               aenr_config_estimator(cfg.get()), aenr_pipeline_latency(p.get()),
               1e3 * static_cast<double>(aenr_pipeline_latency(p.get())) / fs);

  Progress prog;
  if (a.verbose > 0) {
    prog.fs = fs;
    prog.hop = aenr_pipeline_hop(p.get());
    prog.frames_per_second = std::max<size_t>(1, static_cast<size_t>(std::lround(fs / prog.hop)));
    check(aenr_pipeline_set_frame_callback(p.get(), progress_cb, &prog), "callback");
  }
  if (!a.kf_diag.empty()) check(aenr_pipeline_set_diagnostics(p.get(), a.kf_diag.c_str()), "diagnostics");

  std::vector<double> out(mic.size()), err(mic.size());
  check(aenr_pipeline_process(p.get(), mic.data(), far.data(), mic.size(), out.data(), err.data(), nullptr),
        "process");
  check(aenr_write_wav(a.out.c_str(), out.data(), out.size(), fs, 1), "write '" + a.out + "'");

  if (!a.metrics.empty()) {
    std::ofstream os(a.metrics, std::ios::trunc);
    if (!os) die(kExitIo, "cannot write '" + a.metrics + "'");
    os << "scenario,estimator,metric,value\n";
    const std::string scenario = std::filesystem::path(a.mic).stem().string();
    const std::string est = aenr_config_estimator(cfg.get());
    size_t count = 0;
    check(aenr_erle(mic.data(), out.data(), mic.size(), 1.0, fs, nullptr, 0, &count), "erle");
    std::vector<double> erle(count);
    check(aenr_erle(mic.data(), out.data(), mic.size(), 1.0, fs, erle.data(), erle.size(), &count), "erle");
    double mean_erle = NAN;
    if (!erle.empty()) {
      mean_erle = 0.0;
      for (double v : erle) mean_erle += v;
      mean_erle /= static_cast<double>(erle.size());
    }
    write_metric(os, scenario, est, "erle_db", mean_erle);
    double sdr = NAN, seg = NAN;
    if (!near.empty()) {
      bool silent = std::all_of(near.begin(), near.end(), [](double v) { return v == 0.0; });
      if (!silent) {
        check(aenr_si_sdr(out.data(), near.data(), near.size(), &sdr), "si-sdr");
        check(aenr_seg_snr(out.data(), near.data(), near.size(), fs, &seg), "seg-snr");
      }
    }
    write_metric(os, scenario, est, "si_sdr_db", sdr);
    write_metric(os, scenario, est, "seg_snr_db", seg);
  }
  return kExitOk;
}

int cmd_simulate(const std::string& spec, const std::string& out_dir) {
  check(aenr_simulate(spec.c_str(), out_dir.c_str()), "simulate '" + spec + "'");
  return kExitOk;
}

int cmd_eval(const std::vector<std::string>& scenarios, const std::vector<std::string>& estimators,
             const std::string& report, const std::string& config) {
  Config cfg;
  load_config(cfg, config);
  std::vector<const char*> sc, es;
  for (const auto& s : scenarios) sc.push_back(s.c_str());
  for (const auto& e : estimators) es.push_back(e.c_str());
  check(aenr_evaluate(cfg.get(), sc.data(), sc.size(), es.data(), es.size(), report.c_str()), "eval");
  return kExitOk;
}

int cmd_init_weights(const std::string& path, const std::string& config, uint64_t seed, uint32_t channels,
                     uint32_t hidden) {
  Config cfg;
  load_config(cfg, config);
  check(aenr_neural_write_random_weights(cfg.get(), seed, channels, hidden, path.c_str()), "init-weights");
  return kExitOk;
}

int cmd_print_config(const std::string& config) {
  Config cfg;
  load_config(cfg, config);
  size_t needed = 0;
  check(aenr_config_to_text(cfg.get(), nullptr, 0, &needed), "print-config");
  std::string buf(needed, '\0');
  check(aenr_config_to_text(cfg.get(), buf.data(), buf.size(), &needed), "print-config");
  std::fputs(buf.c_str(), stdout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"aenr: streaming acoustic echo and noise reduction"};
  app.set_version_flag("--version", std::string(aenr_version()));
  app.require_subcommand(1);

  ProcessArgs pa;
  auto* process = app.add_subcommand("process", "Run the engine over a mic/far-end WAV pair");
  process->add_option("--mic", pa.mic, "Microphone WAV")->required();
  process->add_option("--farend", pa.farend, "Far-end reference WAV")->required();
  process->add_option("--out", pa.out, "Output WAV (float32)")->required();
  process->add_option("--config", pa.config, "Config file (default: $AENR_CONFIG)");
  process->add_option("--estimator", pa.estimator, "identity | wiener | oracle | neural:<weights>");
  process->add_option("--metrics", pa.metrics, "Write a metrics CSV");
  process->add_option("--near", pa.near, "Clean near-end WAV (oracle reference, SI-SDR)");
  process->add_option("--kf-diag", pa.kf_diag, "Per-frame canceller diagnostics CSV");
  process->add_flag("-v,--verbose", pa.verbose, "Per-second stats on stderr");

  std::string spec, out_dir;
  auto* simulate = app.add_subcommand("simulate", "Render a scenario to a WAV set");
  simulate->add_option("--spec", spec, "Scenario spec file")->required();
  simulate->add_option("--out-dir", out_dir, "Output directory")->required();

  std::vector<std::string> scenarios, estimators{"identity"};
  std::string report, eval_config;
  auto* eval = app.add_subcommand("eval", "Score estimators over scenarios");
  eval->add_option("--scenarios", scenarios, "Scenario directories, spec files or folders of either");
  eval->add_option("--estimators", estimators, "Estimator selectors")->delimiter(',');
  eval->add_option("--report", report, "Output CSV")->required();
  eval->add_option("--config", eval_config, "Config file (default: $AENR_CONFIG)");

  std::string weights_path, weights_config;
  uint64_t seed = 1;
  uint32_t channels = 8, hidden = 64;
  auto* init = app.add_subcommand("init-weights", "Write a randomly initialised weights file");
  init->add_option("--out", weights_path, "Weights file")->required();
  init->add_option("--config", weights_config, "Config file (default: $AENR_CONFIG)");
  init->add_option("--seed", seed, "RNG seed");
  init->add_option("--channels", channels, "Conv channels")->check(CLI::PositiveNumber);
  init->add_option("--hidden", hidden, "GRU hidden size")->check(CLI::PositiveNumber);

  std::string print_config;
  auto* print = app.add_subcommand("print-config", "Print the effective configuration");
  print->add_option("--config", print_config, "Config file (default: $AENR_CONFIG)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*process) return cmd_process(pa);
    if (*simulate) return cmd_simulate(spec, out_dir);
    if (*eval) return cmd_eval(scenarios, estimators, report, eval_config);
    if (*init) return cmd_init_weights(weights_path, weights_config, seed, channels, hidden);
    if (*print) return cmd_print_config(print_config);
  } catch (const CliError& e) {
    return e.code;
  }
  return kExitInternal;
}
