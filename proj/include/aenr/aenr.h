/*
 * Copyright 2026 The AENR Authors
 * License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)
 *
 * C interface of the AENR engine: a Kalman-filter echo canceller followed by
 * a complex-ratio-mask post-filter, plus scenario simulation and evaluation.
 *
 * Every object is an opaque handle created by an aenr_*_create / _load call
 * and released with the matching _destroy. Functions that can fail return an
 * aenr_status; on failure aenr_last_error() describes the problem. The error
 * text is thread-local and valid until the next failing call on that thread.
 *
 * Sample buffers are mono double-precision audio at the configured rate.
 */
#ifndef AENR_AENR_H_
#define AENR_AENR_H_

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(AENR_BUILDING_LIBRARY)
#    define AENR_API __declspec(dllexport)
#  else
#    define AENR_API __declspec(dllimport)
#  endif
#else
#  define AENR_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum aenr_status {
  AENR_OK = 0,
  AENR_ERR_INVALID_ARGUMENT = 1,
  AENR_ERR_CONFIG = 2,
  AENR_ERR_IO = 3,
  AENR_ERR_FORMAT = 4,
  AENR_ERR_INTERNAL = 5
} aenr_status;

AENR_API const char* aenr_version(void);
AENR_API const char* aenr_status_string(aenr_status status);
AENR_API const char* aenr_last_error(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct aenr_config aenr_config;

/* Defaults: N_FFT 512, hop 256, 16 kHz, alpha 0.3, K_B 48, beta 0.33,
 * 10 partitions, smoothing 0.8, estimator "identity". */
AENR_API aenr_status aenr_config_create_default(aenr_config** out);
AENR_API aenr_status aenr_config_load(const char* path, aenr_config** out);
AENR_API aenr_status aenr_config_parse(const char* text, aenr_config** out);
/* "identity", "oracle", "wiener" or "neural:<weights path>". */
AENR_API aenr_status aenr_config_set_estimator(aenr_config* cfg, const char* selector);
AENR_API const char* aenr_config_estimator(const aenr_config* cfg);
AENR_API double aenr_config_sample_rate(const aenr_config* cfg);
/* Writes the full key = value text. *needed receives the size including the
 * terminating NUL; buf may be NULL to query it. */
AENR_API aenr_status aenr_config_to_text(const aenr_config* cfg, char* buf, size_t capacity, size_t* needed);
AENR_API void aenr_config_destroy(aenr_config* cfg);

/* ---- pipeline --------------------------------------------------------- */

typedef struct aenr_pipeline aenr_pipeline;

typedef struct aenr_frame_stats {
  int64_t frame;
  double mic_power;
  double error_power;
  double output_power;
  double coefficient_energy;
} aenr_frame_stats;

typedef void (*aenr_frame_callback)(const aenr_frame_stats* stats, void* user);

/* near_reference is only read by the "oracle" estimator and may be NULL
 * otherwise. */
AENR_API aenr_status aenr_pipeline_create(const aenr_config* cfg, const double* near_reference, size_t near_length,
                                          aenr_pipeline** out);
AENR_API size_t aenr_pipeline_hop(const aenr_pipeline* p);
AENR_API size_t aenr_pipeline_latency(const aenr_pipeline* p);
/* Streaming: n must equal aenr_pipeline_hop(); out lags mic by latency. */
AENR_API aenr_status aenr_pipeline_process_block(aenr_pipeline* p, const double* mic, const double* farend,
                                                 double* out, size_t n);
/* Whole signal from a fresh state; out is latency-compensated and n long.
 * error_out (z) and echo_out (e_hat) may be NULL. */
AENR_API aenr_status aenr_pipeline_process(aenr_pipeline* p, const double* mic, const double* farend, size_t n,
                                           double* out, double* error_out, double* echo_out);
AENR_API double aenr_pipeline_coefficient_energy(const aenr_pipeline* p);
AENR_API aenr_status aenr_pipeline_set_frame_callback(aenr_pipeline* p, aenr_frame_callback cb, void* user);
/* Per-frame CSV rows "frame,erle_db,coefficient_energy"; NULL disables. */
AENR_API aenr_status aenr_pipeline_set_diagnostics(aenr_pipeline* p, const char* csv_path);
AENR_API void aenr_pipeline_reset(aenr_pipeline* p);
AENR_API void aenr_pipeline_destroy(aenr_pipeline* p);

/* ---- audio files ------------------------------------------------------ */

typedef struct aenr_audio aenr_audio;

/* Mono 16-bit PCM or 32-bit float WAV. */
AENR_API aenr_status aenr_audio_read_wav(const char* path, aenr_audio** out);
AENR_API size_t aenr_audio_length(const aenr_audio* a);
AENR_API double aenr_audio_sample_rate(const aenr_audio* a);
AENR_API const double* aenr_audio_data(const aenr_audio* a);
AENR_API void aenr_audio_destroy(aenr_audio* a);
/* float32 != 0 writes 32-bit float, otherwise 16-bit PCM. */
AENR_API aenr_status aenr_write_wav(const char* path, const double* samples, size_t n, double sample_rate,
                                    int float32);

/* ---- simulation & evaluation ----------------------------------------- */

/* Generates the scenario described by a key = value spec file and writes
 * mic/near/echo/noise/farend.wav and manifest.txt into out_dir. */
AENR_API aenr_status aenr_simulate(const char* spec_path, const char* out_dir);

/* Runs every estimator on every scenario (directories written by
 * aenr_simulate, spec files, or folders containing either) and writes a CSV
 * "scenario,estimator,erle_db,si_sdr_db,seg_snr_db,rtf". */
AENR_API aenr_status aenr_evaluate(const aenr_config* cfg, const char* const* scenarios, size_t scenario_count,
                                   const char* const* estimators, size_t estimator_count, const char* report_path);

/* ---- metrics ---------------------------------------------------------- */

AENR_API aenr_status aenr_si_sdr(const double* estimate, const double* reference, size_t n, double* out_db);
AENR_API aenr_status aenr_seg_snr(const double* estimate, const double* reference, size_t n, double sample_rate,
                                  double* out_db);
/* Block ERLE; writes up to capacity values and the total count. */
AENR_API aenr_status aenr_erle(const double* mic, const double* error, size_t n, double block_s, double sample_rate,
                               double* out_db, size_t capacity, size_t* count);

/* ---- neural estimator weights ---------------------------------------- */

/* Writes a seeded random weights file whose geometry matches cfg. */
AENR_API aenr_status aenr_neural_write_random_weights(const aenr_config* cfg, uint64_t seed, uint32_t conv_channels,
                                                      uint32_t hidden, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* AENR_AENR_H_ */
