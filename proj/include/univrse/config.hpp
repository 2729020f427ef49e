// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "univrse/backends.hpp"
#include "univrse/baselines.hpp"
#include "univrse/longform.hpp"
#include "univrse/vcse.hpp"

namespace univrse {

struct RunConfig {
  std::uint64_t seed = 0;
  int samples = 10;  // M
  double temperature = 1.0;
  double lambda = 1.0;
  std::string transform_preset = "trans1";
  std::string distortion_preset = "noise3";
  TransformPlacement placement = TransformPlacement::Both;
  bool length_normalize = false;
  bool raw_masses = false;
  bool question_as_context = true;
  double binarize_threshold = 0.0;
  double response_temperature = 0.1;
  int max_tokens = 256;
  int response_max_tokens = 512;
  int top_logprobs = 20;
  int record_workers = 4;
  int sample_workers = 4;
  int claim_workers = 2;
  std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
  std::string templates;  // registry.json; empty selects the bundled set

  BackendConfig vlm;
  BackendConfig nli;
  BackendConfig llm;
  std::vector<BackendConfig> auxiliary;

  /// Parses the TOML file; relative `script` and `templates` paths resolve
  /// against the file's directory. Throws ConfigError.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  bool enabled(Method m) const;
  VseConfig vse_config() const;
  LongformConfig longform_config() const;
};

void validate(const RunConfig& cfg);

/// SHA-256 over the canonical JSON of every config field plus the template
/// hashes.
std::string config_hash(const RunConfig& cfg, const std::map<std::string, std::string>& template_hashes);

}  // namespace univrse
