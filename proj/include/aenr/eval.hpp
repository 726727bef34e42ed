// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "aenr/config.hpp"
#include "aenr/sim.hpp"

namespace aenr {

// File set written by write_scenario(): mic/near/echo/noise/farend.wav
// (float32) plus manifest.txt (the spec followed by measured levels).
inline constexpr const char* kManifestName = "manifest.txt";

void write_scenario(const std::filesystem::path& dir, const ScenarioSpec& spec, const ScenarioTruth& truth);

struct ScenarioInput {
  std::string name;
  ScenarioKind kind = ScenarioKind::kDoubleTalk;
  ScenarioTruth truth;
};

// Reads a scenario directory, or generates one from a spec file.
ScenarioInput load_scenario_input(const std::filesystem::path& path);

// Expands each argument: a scenario directory (contains mic.wav) or a spec
// file is kept; any other directory contributes its scenario subdirectories
// and *.cfg / *.txt spec files in sorted order.
std::vector<std::filesystem::path> expand_scenario_paths(const std::vector<std::filesystem::path>& args);

// Measured SER/SNR of a truth set on active-frame powers (NaN where undefined).
struct MeasuredLevels {
  double ser_db;
  double snr_db;
};
MeasuredLevels measure_levels(ScenarioKind kind, const ScenarioTruth& truth);

struct EvalRow {
  std::string scenario;
  std::string estimator;
  double erle_db;     // FST only: mean 1 s block ERLE of mic vs output
  double si_sdr_db;   // vs near end; NaN for FST
  double seg_snr_db;  // vs near end; NaN for FST
  double rtf;
};

// Every selector is resolved (weights loaded) before any scenario runs, so a
// bad estimator fails fast with ConfigError.
std::vector<EvalRow> evaluate(const std::vector<ScenarioInput>& scenarios, const std::vector<std::string>& estimators,
                              const PipelineConfig& cfg, int rtf_runs = 1);

void write_eval_csv(std::ostream& os, const std::vector<EvalRow>& rows);

}  // namespace aenr
