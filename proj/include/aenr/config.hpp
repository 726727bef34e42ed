// Copyright 2026 The AENR Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "aenr/kalman_aec.hpp"
#include "aenr/mask.hpp"
#include "aenr/sim.hpp"
#include "aenr/stft.hpp"

namespace aenr {

// Flat "key = value" text. '#' starts a comment; blank lines are ignored.
struct KeyValue {
  std::string key;
  std::string value;
  int line = 0;
};

std::vector<KeyValue> parse_key_values(const std::string& text, const std::string& source);
std::string read_text_file(const std::filesystem::path& path);

struct PipelineConfig {
  StftConfig stft;
  KalmanConfig kalman;
  double alpha = 0.3;
  std::size_t band_length = 48;
  double band_overlap = 0.33;
  MaskConfig mask;
  WienerConfig wiener;
  std::string estimator = "identity";

  // Copies the STFT geometry into the Kalman config and validates everything;
  // throws ConfigError.
  void validate();

  // Unknown keys and malformed values throw ConfigError naming source:line.
  static PipelineConfig parse(const std::string& text, const std::string& source = "<config>");
  static PipelineConfig load(const std::filesystem::path& path);
  std::string to_text() const;
};

ScenarioSpec parse_scenario(const std::string& text, const std::string& source = "<scenario>");
ScenarioSpec load_scenario(const std::filesystem::path& path);
std::string to_text(const ScenarioSpec& spec);

}  // namespace aenr
