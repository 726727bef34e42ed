// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#include "aenr/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "aenr/error.hpp"
#include "aenr/metrics.hpp"
#include "aenr/pipeline.hpp"
#include "aenr/wav.hpp"

namespace aenr {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kComponents[] = {"mic", "near", "echo", "noise", "farend"};

std::vector<double>* component(ScenarioTruth& t, int i) {
  std::vector<double>* all[] = {&t.mic, &t.near, &t.echo, &t.noise, &t.farend};
  return all[i];
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

double db_ratio(double num, double den) {
  return num > 0.0 && den > 0.0 ? 10.0 * std::log10(num / den) : kNaN;
}

}  // namespace

MeasuredLevels measure_levels(ScenarioKind kind, const ScenarioTruth& t) {
  const double fs = t.sample_rate;
  const double ps = active_power(t.near, fs);
  const double pe = active_power(t.echo, fs);
  const double pv = active_power(t.noise, fs);
  MeasuredLevels m{kNaN, kNaN};
  if (kind == ScenarioKind::kDoubleTalk) m.ser_db = db_ratio(ps, pe);
  m.snr_db = db_ratio(kind == ScenarioKind::kFarEndSingleTalk ? pe : ps, pv);
  return m;
}

void write_scenario(const fs::path& dir, const ScenarioSpec& spec, const ScenarioTruth& truth) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  ScenarioTruth copy = truth;
  for (int i = 0; i < 5; ++i)
    write_wav(dir / (std::string(kComponents[i]) + ".wav"), Audio{*component(copy, i), truth.sample_rate});
  const MeasuredLevels m = measure_levels(spec.kind, truth);
  std::ofstream os(dir / kManifestName, std::ios::trunc);
  if (!os) throw IoError("cannot write manifest in '" + dir.string() + "'");
  os << to_text(spec);
  os.precision(10);
  if (std::isfinite(m.ser_db)) os << "# measured_ser_db = " << m.ser_db << "\n";
  if (std::isfinite(m.snr_db)) os << "# measured_snr_db = " << m.snr_db << "\n";
  os << "# samples = " << truth.size() << "\n";
}

ScenarioInput load_scenario_input(const fs::path& path) {
  ScenarioInput in;
  if (fs::is_directory(path)) {
    in.name = path.filename().empty() ? path.parent_path().filename().string() : path.filename().string();
    for (int i = 0; i < 5; ++i) {
      const Audio a = read_wav(path / (std::string(kComponents[i]) + ".wav"));
      *component(in.truth, i) = a.samples;
      in.truth.sample_rate = a.sample_rate;
    }
    const std::size_t n = in.truth.mic.size();
    for (int i = 1; i < 5; ++i)
      if (component(in.truth, i)->size() != n)
        throw FormatError("scenario '" + path.string() + "': component lengths differ");
    if (fs::exists(path / kManifestName)) {
      in.kind = load_scenario(path / kManifestName).kind;
    } else if (all_zero(in.truth.near)) {
      in.kind = ScenarioKind::kFarEndSingleTalk;
    } else {
      in.kind = all_zero(in.truth.echo) ? ScenarioKind::kNearEndSingleTalk : ScenarioKind::kDoubleTalk;
    }
    return in;
  }
  if (!fs::exists(path)) throw IoError("scenario '" + path.string() + "' does not exist");
  const ScenarioSpec spec = load_scenario(path);
  in.name = path.stem().string();
  in.kind = spec.kind;
  in.truth = generate(spec);
  return in;
}

std::vector<fs::path> expand_scenario_paths(const std::vector<fs::path>& args) {
  std::vector<fs::path> out;
  for (const auto& a : args) {
    if (!fs::is_directory(a) || fs::exists(a / "mic.wav")) {
      out.push_back(a);
      continue;
    }
    std::vector<fs::path> found;
    for (const auto& entry : fs::directory_iterator(a)) {
      const fs::path& p = entry.path();
      const auto ext = p.extension().string();
      if ((entry.is_directory() && fs::exists(p / "mic.wav")) ||
          (entry.is_regular_file() && (ext == ".cfg" || ext == ".txt")))
        found.push_back(p);
    }
    std::sort(found.begin(), found.end());
    out.insert(out.end(), found.begin(), found.end());
  }
  return out;
}

std::vector<EvalRow> evaluate(const std::vector<ScenarioInput>& scenarios, const std::vector<std::string>& estimators,
                              const PipelineConfig& cfg, int rtf_runs) {
  // Resolve selectors up front; the oracle gets a placeholder reference.
  const std::vector<double> probe(1, 0.0);
  for (const auto& sel : estimators) make_estimator(sel, cfg, probe);

  std::vector<EvalRow> rows;
  for (const auto& sc : scenarios) {
    const ScenarioTruth& t = sc.truth;
    const double fs = t.sample_rate;
    if (std::lround(fs) != std::lround(cfg.stft.sample_rate))
      throw ConfigError("scenario '" + sc.name + "' sample rate differs from the pipeline's");
    const double duration = static_cast<double>(t.size()) / fs;
    for (const auto& sel : estimators) {
      Pipeline p(cfg, make_estimator(sel, cfg, t.near));
      ProcessResult res;
      const RtfResult timing = rtf([&] { res = p.process(t.mic, t.farend); }, std::max(duration, 1e-9), rtf_runs);

      EvalRow row{sc.name, sel, kNaN, kNaN, kNaN, timing.median};
      if (sc.kind == ScenarioKind::kFarEndSingleTalk) {
        const auto blocks = erle(t.mic, res.output, 1.0, fs);
        row.erle_db = mean(blocks);
      } else if (!all_zero(t.near)) {
        row.si_sdr_db = si_sdr(res.output, t.near);
        row.seg_snr_db = seg_snr(res.output, t.near, fs);
      }
      rows.push_back(row);
    }
  }
  return rows;
}

void write_eval_csv(std::ostream& os, const std::vector<EvalRow>& rows) {
  os << "scenario,estimator,erle_db,si_sdr_db,seg_snr_db,rtf\n";
  const auto fmt = [](double v) {
    if (!std::isfinite(v)) return std::string("nan");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return std::string(buf);
  };
  for (const auto& r : rows)
    os << r.scenario << ',' << r.estimator << ',' << fmt(r.erle_db) << ',' << fmt(r.si_sdr_db) << ','
       << fmt(r.seg_snr_db) << ',' << fmt(r.rtf) << '\n';
}

}  // namespace aenr
