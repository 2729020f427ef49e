// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace univrse {

class TemplateRegistry;

/// Which part of the pipeline issued a generation call. Carried alongside the
/// request so scripted backends can answer per branch and per sample.
struct RequestTags {
  std::string branch;  // "response", "original", "distorted", "auxiliary"
  std::size_t sample_index = 0;
};

struct GenerationRequest {
  std::optional<std::vector<std::uint8_t>> image_png;
  std::string prompt;
  double temperature = 1.0;
  int max_tokens = 256;
  int top_logprobs = 20;
  std::optional<std::uint64_t> seed;
  RequestTags tags;
};

struct TokenLogprob {
  double logprob = 0.0;
  std::vector<double> top_logprobs;  // sorted descending
};

struct GenerationResult {
  std::string text;
  std::vector<TokenLogprob> tokens;
};

struct EntailmentVerdict {
  bool forward = false;   // premise entails hypothesis
  bool backward = false;  // hypothesis entails premise
};

struct BackendConfig {
  std::string kind = "http";  // "http" or "mock"
  std::string endpoint;       // e.g. http://127.0.0.1:8080/v1
  std::string model;
  std::string api_key_env;    // name of the variable, never its value
  double timeout_s = 60.0;
  int max_retries = 3;
  int parallelism = 4;
  double backoff_base_s = 1.0;
  bool send_tags = false;     // forward RequestTags as chat `metadata`
  std::string script;         // mock script path for kind == "mock"

  nlohmann::json to_json() const;
  static BackendConfig from_json(const nlohmann::json& j);
};

void validate(const BackendConfig& cfg);
void validate(const GenerationRequest& req);
void validate(const GenerationResult& result);

class VlmBackend {
 public:
  virtual ~VlmBackend() = default;
  virtual GenerationResult generate(const GenerationRequest& req) = 0;
  virtual std::string id() const = 0;
};

class NliBackend {
 public:
  virtual ~NliBackend() = default;
  virtual EntailmentVerdict entail(std::string_view premise, std::string_view hypothesis) = 0;
  virtual std::string id() const = 0;
};

struct LlmRequest {
  std::string template_id;
  std::map<std::string, std::string> inputs;
  std::string prompt;  // rendered template
  int attempt = 0;     // 1 for the repair retry
  std::string previous_output;
};

class LlmBackend {
 public:
  virtual ~LlmBackend() = default;
  /// Raw completion text; parsing and schema checks happen in llm_structured.
  virtual std::string complete(const LlmRequest& req) = 0;
  virtual std::string id() const = 0;
};

/// Validates the request and the returned result around backend.generate.
GenerationResult generate(VlmBackend& backend, const GenerationRequest& req);

/// "Question: {context} Answer: {candidate}", or the bare candidate when the
/// context is empty.
std::string entailment_input(std::string_view candidate, std::string_view context);

/// Mutual entailment of the two context-qualified strings. The pair is put in
/// canonical order before the backend sees it, so the result is symmetric.
bool semantically_equivalent(NliBackend& backend, std::string_view a, std::string_view b,
                             std::string_view context);

/// Renders the template, calls the backend, parses JSON and validates it
/// against the template schema. One repair retry on failure.
nlohmann::json llm_structured(LlmBackend& backend, const TemplateRegistry& templates,
                              const std::string& template_id,
                              const std::map<std::string, std::string>& inputs);

/// Pulls the first JSON document out of model text (tolerates code fences).
std::optional<nlohmann::json> extract_json(std::string_view text);

}  // namespace univrse
