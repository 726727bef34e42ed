// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/pipeline.hpp"

#include <algorithm>

#include "aenr/error.hpp"
#include "aenr/neural.hpp"

namespace aenr {

std::unique_ptr<MaskEstimator> make_estimator(const std::string& selector, const PipelineConfig& cfg,
                                              std::span<const double> near_reference) {
  const std::size_t K = cfg.stft.bins();
  if (selector == "identity") return std::make_unique<IdentityEstimator>(K);
  if (selector == "wiener") return std::make_unique<WienerEstimator>(K, cfg.mask, cfg.wiener);
  if (selector == "oracle") {
    if (near_reference.empty()) throw ConfigError("estimator 'oracle' needs the near-end reference signal");
    return std::make_unique<OracleEstimator>(std::vector<double>(near_reference.begin(), near_reference.end()),
                                             cfg.stft, cfg.alpha, cfg.mask);
  }
  if (selector.rfind("neural", 0) == 0) {
    if (selector.size() <= 7 || selector[6] != ':')
      throw ConfigError("estimator 'neural' needs a weights file: neural:<path>");
    NeuralWeights w;
    try {
      w = NeuralWeights::load(selector.substr(7));
    } catch (const IoError& e) {
      throw ConfigError(std::string("estimator '") + selector + "': " + e.what());
    }
    auto est = std::make_unique<NeuralMaskEstimator>(std::move(w), cfg.mask.ceiling);
    est->check_geometry(make_layout(K, cfg.band_length, cfg.band_overlap));
    return est;
  }
  throw ConfigError("unknown estimator '" + selector + "' (identity, oracle, wiener, neural:<path>)");
}

Pipeline::Pipeline(PipelineConfig cfg, std::unique_ptr<MaskEstimator> estimator)
    : cfg_((cfg.validate(), std::move(cfg))),
      layout_(make_layout(cfg_.stft.bins(), cfg_.band_length, cfg_.band_overlap)),
      estimator_(std::move(estimator)),
      kf_(cfg_.kalman),
      stft_(cfg_.stft),
      z_frame_(cfg_.stft.fft_order, cfg_.stft.hop),
      e_frame_(cfg_.stft.fft_order, cfg_.stft.hop),
      y_frame_(cfg_.stft.fft_order, cfg_.stft.hop),
      ola_(stft_.make_overlap_state()),
      echo_(cfg_.stft.hop),
      error_(cfg_.stft.hop) {
  if (!estimator_) throw ConfigError("pipeline needs a mask estimator");
  if (auto* neural = dynamic_cast<NeuralMaskEstimator*>(estimator_.get())) neural->check_geometry(layout_);
}

void Pipeline::reset() {
  kf_.reset();
  z_frame_.reset();
  e_frame_.reset();
  y_frame_.reset();
  ola_ = stft_.make_overlap_state();
  estimator_->reset();
  frame_ = 0;
}

void Pipeline::process_block(std::span<const double> mic, std::span<const double> farend, std::span<double> out,
                             std::span<double> echo_out, std::span<double> error_out) {
  const std::size_t H = hop();
  if (mic.size() != H || farend.size() != H || out.size() != H)
    throw InvalidArgument("process_block: mic, farend and out must hold exactly one hop");

  kf_.process(mic, farend, echo_, error_);

  const Spectrum z = stft_.analyze(z_frame_.push(error_), frame_);
  const Spectrum e = stft_.analyze(e_frame_.push(echo_), frame_);
  const Spectrum y = stft_.analyze(y_frame_.push(farend), frame_);
  const FrontendFrame fe = frontend_frame(z, e, y, cfg_.alpha, layout_);

  ComplexMask mask = estimator_->step(EstimatorInput{fe.block, z, e, y});
  if (mask.size() != z.size()) throw InvalidArgument("estimator '" + estimator_->name() + "' returned a mask of wrong length");
  sanitize(mask, cfg_.mask.ceiling);

  Spectrum s = decompress(apply_mask(fe.error, mask), cfg_.alpha);
  s.frame_index = frame_;
  stft_.synthesize(s, ola_, out);

  if (!echo_out.empty()) std::copy(echo_.begin(), echo_.end(), echo_out.begin());
  if (!error_out.empty()) std::copy(error_.begin(), error_.end(), error_out.begin());

  if (observer_) {
    FrameStats st;
    st.frame = frame_;
    for (std::size_t i = 0; i < H; ++i) {
      st.mic_power += mic[i] * mic[i];
      st.error_power += error_[i] * error_[i];
      st.output_power += out[i] * out[i];
    }
    st.mic_power /= static_cast<double>(H);
    st.error_power /= static_cast<double>(H);
    st.output_power /= static_cast<double>(H);
    st.coefficient_energy = kf_.state().coefficient_energy();
    observer_(st);
  }
  ++frame_;
}

ProcessResult Pipeline::process(std::span<const double> mic, std::span<const double> farend) {
  if (mic.size() != farend.size()) throw InvalidArgument("process: mic and farend lengths differ");
  reset();
  const std::size_t n = mic.size();
  const std::size_t H = hop();
  const std::size_t total = n + latency();
  const std::size_t blocks = (total + H - 1) / H;

  ProcessResult r;
  r.output.assign(n, 0.0);
  r.error.assign(n, 0.0);
  r.echo.assign(n, 0.0);
  std::vector<double> x(H), y(H), out(H), e(H), z(H);
  for (std::size_t b = 0; b < blocks; ++b) {
    const std::size_t start = b * H;
    for (std::size_t i = 0; i < H; ++i) {
      const std::size_t idx = start + i;
      x[i] = idx < n ? mic[idx] : 0.0;
      y[i] = idx < n ? farend[idx] : 0.0;
    }
    process_block(x, y, out, e, z);
    for (std::size_t i = 0; i < H; ++i) {
      const std::size_t idx = start + i;
      if (idx < n) {
        r.echo[idx] = e[i];
        r.error[idx] = z[i];
      }
      if (idx >= latency() && idx - latency() < n) r.output[idx - latency()] = out[i];
    }
  }
  return r;
}

}  // namespace aenr
