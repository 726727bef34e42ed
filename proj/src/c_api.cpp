// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/aenr.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "aenr/config.hpp"
#include "aenr/error.hpp"
#include "aenr/eval.hpp"
#include "aenr/metrics.hpp"
#include "aenr/neural.hpp"
#include "aenr/pipeline.hpp"
#include "aenr/wav.hpp"

struct aenr_config {
  aenr::PipelineConfig cfg;
};

struct aenr_pipeline {
  std::unique_ptr<aenr::Pipeline> pipeline;
  aenr_frame_callback callback = nullptr;
  void* user = nullptr;
  std::unique_ptr<std::ofstream> diagnostics;
};

struct aenr_audio {
  aenr::Audio audio;
};

namespace {

thread_local std::string g_last_error;

aenr_status fail(aenr_status s, const std::string& msg) {
  g_last_error = msg;
  return s;
}

// Runs fn, mapping library exceptions onto status codes.
template <typename Fn>
aenr_status guarded(Fn&& fn) {
  try {
    fn();
    return AENR_OK;
  } catch (const aenr::InvalidArgument& e) {
    return fail(AENR_ERR_INVALID_ARGUMENT, e.what());
  } catch (const aenr::ConfigError& e) {
    return fail(AENR_ERR_CONFIG, e.what());
  } catch (const aenr::IoError& e) {
    return fail(AENR_ERR_IO, e.what());
  } catch (const aenr::FormatError& e) {
    return fail(AENR_ERR_FORMAT, e.what());
  } catch (const std::exception& e) {
    return fail(AENR_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(AENR_ERR_INTERNAL, "unknown error");
  }
}

void require(bool cond, const char* msg) {
  if (!cond) throw aenr::InvalidArgument(msg);
}

void install_observer(aenr_pipeline* p) {
  if (!p->callback && !p->diagnostics) {
    p->pipeline->set_frame_observer(nullptr);
    return;
  }
  p->pipeline->set_frame_observer([p](const aenr::FrameStats& s) {
    if (p->callback) {
      const aenr_frame_stats c{s.frame, s.mic_power, s.error_power, s.output_power, s.coefficient_energy};
      p->callback(&c, p->user);
    }
    if (p->diagnostics) {
      const double erle_db = 10.0 * std::log10(std::max(s.mic_power, aenr::kErleFloor) /
                                               std::max(s.error_power, aenr::kErleFloor));
      *p->diagnostics << s.frame << ',' << erle_db << ',' << s.coefficient_energy << '\n';
    }
  });
}

}  // namespace

extern "C" {

const char* aenr_version(void) { return "1.0.0"; }

const char* aenr_status_string(aenr_status status) {
  switch (status) {
    case AENR_OK: return "ok";
    case AENR_ERR_INVALID_ARGUMENT: return "invalid argument";
    case AENR_ERR_CONFIG: return "configuration error";
    case AENR_ERR_IO: return "i/o error";
    case AENR_ERR_FORMAT: return "format error";
    case AENR_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* aenr_last_error(void) { return g_last_error.c_str(); }

aenr_status aenr_config_create_default(aenr_config** out) {
  return guarded([&] {
    require(out, "out is NULL");
    auto c = std::make_unique<aenr_config>();
    c->cfg.validate();
    *out = c.release();
  });
}

aenr_status aenr_config_load(const char* path, aenr_config** out) {
  return guarded([&] {
    require(path && out, "path/out is NULL");
    *out = new aenr_config{aenr::PipelineConfig::load(path)};
  });
}

aenr_status aenr_config_parse(const char* text, aenr_config** out) {
  return guarded([&] {
    require(text && out, "text/out is NULL");
    *out = new aenr_config{aenr::PipelineConfig::parse(text)};
  });
}

aenr_status aenr_config_set_estimator(aenr_config* cfg, const char* selector) {
  return guarded([&] {
    require(cfg && selector, "cfg/selector is NULL");
    cfg->cfg.estimator = selector;
  });
}

const char* aenr_config_estimator(const aenr_config* cfg) { return cfg ? cfg->cfg.estimator.c_str() : ""; }

double aenr_config_sample_rate(const aenr_config* cfg) { return cfg ? cfg->cfg.stft.sample_rate : 0.0; }

aenr_status aenr_config_to_text(const aenr_config* cfg, char* buf, size_t capacity, size_t* needed) {
  return guarded([&] {
    require(cfg, "cfg is NULL");
    const std::string text = cfg->cfg.to_text();
    if (needed) *needed = text.size() + 1;
    if (buf) {
      require(capacity >= text.size() + 1, "buffer too small");
      std::memcpy(buf, text.c_str(), text.size() + 1);
    }
  });
}

void aenr_config_destroy(aenr_config* cfg) { delete cfg; }

aenr_status aenr_pipeline_create(const aenr_config* cfg, const double* near_reference, size_t near_length,
                                 aenr_pipeline** out) {
  return guarded([&] {
    require(cfg && out, "cfg/out is NULL");
    require(near_reference || near_length == 0, "near_reference is NULL but near_length > 0");
    std::span<const double> ref;
    if (near_reference) ref = {near_reference, near_length};
    auto est = aenr::make_estimator(cfg->cfg.estimator, cfg->cfg, ref);
    auto p = std::make_unique<aenr_pipeline>();
    p->pipeline = std::make_unique<aenr::Pipeline>(cfg->cfg, std::move(est));
    *out = p.release();
  });
}

size_t aenr_pipeline_hop(const aenr_pipeline* p) { return p ? p->pipeline->hop() : 0; }
size_t aenr_pipeline_latency(const aenr_pipeline* p) { return p ? p->pipeline->latency() : 0; }

aenr_status aenr_pipeline_process_block(aenr_pipeline* p, const double* mic, const double* farend, double* out,
                                        size_t n) {
  return guarded([&] {
    require(p && mic && farend && out, "NULL argument");
    p->pipeline->process_block({mic, n}, {farend, n}, {out, n});
  });
}

aenr_status aenr_pipeline_process(aenr_pipeline* p, const double* mic, const double* farend, size_t n, double* out,
                                  double* error_out, double* echo_out) {
  return guarded([&] {
    require(p && mic && farend && out, "NULL argument");
    const aenr::ProcessResult r = p->pipeline->process({mic, n}, {farend, n});
    std::copy(r.output.begin(), r.output.end(), out);
    if (error_out) std::copy(r.error.begin(), r.error.end(), error_out);
    if (echo_out) std::copy(r.echo.begin(), r.echo.end(), echo_out);
    if (p->diagnostics) p->diagnostics->flush();
  });
}

double aenr_pipeline_coefficient_energy(const aenr_pipeline* p) {
  return p ? p->pipeline->canceller().state().coefficient_energy() : 0.0;
}

aenr_status aenr_pipeline_set_frame_callback(aenr_pipeline* p, aenr_frame_callback cb, void* user) {
  return guarded([&] {
    require(p, "pipeline is NULL");
    p->callback = cb;
    p->user = user;
    install_observer(p);
  });
}

aenr_status aenr_pipeline_set_diagnostics(aenr_pipeline* p, const char* csv_path) {
  return guarded([&] {
    require(p, "pipeline is NULL");
    p->diagnostics.reset();
    if (csv_path) {
      auto os = std::make_unique<std::ofstream>(csv_path, std::ios::trunc);
      if (!*os) throw aenr::IoError(std::string("cannot write '") + csv_path + "'");
      *os << "frame,erle_db,coefficient_energy\n";
      p->diagnostics = std::move(os);
    }
    install_observer(p);
  });
}

void aenr_pipeline_reset(aenr_pipeline* p) {
  if (p) p->pipeline->reset();
}

void aenr_pipeline_destroy(aenr_pipeline* p) { delete p; }

aenr_status aenr_audio_read_wav(const char* path, aenr_audio** out) {
  return guarded([&] {
    require(path && out, "path/out is NULL");
    *out = new aenr_audio{aenr::read_wav(path)};
  });
}

size_t aenr_audio_length(const aenr_audio* a) { return a ? a->audio.samples.size() : 0; }
double aenr_audio_sample_rate(const aenr_audio* a) { return a ? a->audio.sample_rate : 0.0; }
const double* aenr_audio_data(const aenr_audio* a) { return a ? a->audio.samples.data() : nullptr; }
void aenr_audio_destroy(aenr_audio* a) { delete a; }

aenr_status aenr_write_wav(const char* path, const double* samples, size_t n, double sample_rate, int float32) {
  return guarded([&] {
    require(path && (samples || n == 0), "NULL argument");
    aenr::Audio a{std::vector<double>(samples, samples + n), sample_rate};
    aenr::write_wav(path, a, float32 ? aenr::WavEncoding::kFloat32 : aenr::WavEncoding::kPcm16);
  });
}

aenr_status aenr_simulate(const char* spec_path, const char* out_dir) {
  return guarded([&] {
    require(spec_path && out_dir, "NULL argument");
    const aenr::ScenarioSpec spec = aenr::load_scenario(spec_path);
    aenr::write_scenario(out_dir, spec, aenr::generate(spec));
  });
}

aenr_status aenr_evaluate(const aenr_config* cfg, const char* const* scenarios, size_t scenario_count,
                          const char* const* estimators, size_t estimator_count, const char* report_path) {
  return guarded([&] {
    require(cfg && report_path, "NULL argument");
    require(scenarios || scenario_count == 0, "scenarios is NULL");
    require(estimators || estimator_count == 0, "estimators is NULL");
    std::vector<std::filesystem::path> args(scenarios, scenarios + scenario_count);
    std::vector<std::string> sel(estimators, estimators + estimator_count);
    std::vector<aenr::ScenarioInput> inputs;
    for (const auto& p : aenr::expand_scenario_paths(args)) inputs.push_back(aenr::load_scenario_input(p));
    const auto rows = aenr::evaluate(inputs, sel, cfg->cfg);
    std::ofstream os(report_path, std::ios::trunc);
    if (!os) throw aenr::IoError(std::string("cannot write '") + report_path + "'");
    aenr::write_eval_csv(os, rows);
  });
}

aenr_status aenr_si_sdr(const double* estimate, const double* reference, size_t n, double* out_db) {
  return guarded([&] {
    require(estimate && reference && out_db, "NULL argument");
    *out_db = aenr::si_sdr({estimate, n}, {reference, n});
  });
}

aenr_status aenr_seg_snr(const double* estimate, const double* reference, size_t n, double sample_rate,
                         double* out_db) {
  return guarded([&] {
    require(estimate && reference && out_db, "NULL argument");
    *out_db = aenr::seg_snr({estimate, n}, {reference, n}, sample_rate);
  });
}

aenr_status aenr_erle(const double* mic, const double* error, size_t n, double block_s, double sample_rate,
                      double* out_db, size_t capacity, size_t* count) {
  return guarded([&] {
    require(mic && error, "NULL argument");
    const auto v = aenr::erle({mic, n}, {error, n}, block_s, sample_rate);
    if (count) *count = v.size();
    for (size_t i = 0; i < v.size() && i < capacity && out_db; ++i) out_db[i] = v[i];
  });
}

aenr_status aenr_neural_write_random_weights(const aenr_config* cfg, uint64_t seed, uint32_t conv_channels,
                                             uint32_t hidden, const char* path) {
  return guarded([&] {
    require(cfg && path, "NULL argument");
    const auto layout = aenr::make_layout(cfg->cfg.stft.bins(), cfg->cfg.band_length, cfg->cfg.band_overlap);
    aenr::NeuralTopology t;
    t.rows = static_cast<uint32_t>(layout.rows());
    t.cols = static_cast<uint32_t>(layout.band_length);
    t.bins = static_cast<uint32_t>(layout.bins);
    t.conv_channels = conv_channels;
    t.hidden = hidden;
    aenr::NeuralWeights::random(t, seed).save(path);
  });
}

}  // extern "C"
