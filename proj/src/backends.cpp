// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/backends.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "univrse/error.hpp"
#include "univrse/templates.hpp"

namespace univrse {
namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

nlohmann::json BackendConfig::to_json() const {
  return {{"kind", kind},
          {"endpoint", endpoint},
          {"model", model},
          {"api_key_env", api_key_env},
          {"timeout_s", timeout_s},
          {"max_retries", max_retries},
          {"parallelism", parallelism},
          {"backoff_base_s", backoff_base_s},
          {"send_tags", send_tags},
          {"script", script}};
}

BackendConfig BackendConfig::from_json(const nlohmann::json& j) {
  BackendConfig c;
  c.kind = j.value("kind", c.kind);
  c.endpoint = j.value("endpoint", c.endpoint);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.max_retries = j.value("max_retries", c.max_retries);
  c.parallelism = j.value("parallelism", c.parallelism);
  c.backoff_base_s = j.value("backoff_base_s", c.backoff_base_s);
  c.send_tags = j.value("send_tags", c.send_tags);
  c.script = j.value("script", c.script);
  return c;
}

void validate(const BackendConfig& cfg) {
  if (cfg.kind != "http" && cfg.kind != "mock")
    throw Error(ErrorKind::ConfigError, "backend kind must be 'http' or 'mock'");
  if (!(cfg.timeout_s > 0.0)) throw Error(ErrorKind::ConfigError, "timeout must be > 0");
  if (cfg.parallelism < 1) throw Error(ErrorKind::ConfigError, "parallelism must be >= 1");
  if (cfg.max_retries < 0) throw Error(ErrorKind::ConfigError, "max_retries must be >= 0");
  if (cfg.kind == "http" && cfg.endpoint.empty())
    throw Error(ErrorKind::ConfigError, "http backend needs an endpoint");
  if (cfg.kind == "mock" && cfg.script.empty())
    throw Error(ErrorKind::ConfigError, "mock backend needs a script");
}

void validate(const GenerationRequest& req) {
  if (!(req.temperature > 0.0)) throw Error(ErrorKind::InvalidConfig, "temperature must be > 0");
  if (req.max_tokens < 1) throw Error(ErrorKind::InvalidConfig, "max_tokens must be >= 1");
  if (req.top_logprobs < 1) throw Error(ErrorKind::InvalidConfig, "top_logprobs must be >= 1");
}

void validate(const GenerationResult& result) {
  for (const auto& t : result.tokens) {
    if (std::isnan(t.logprob) || t.logprob > 0.0)
      throw Error(ErrorKind::MalformedResponse, "token logprob must be <= 0");
    if (!std::is_sorted(t.top_logprobs.begin(), t.top_logprobs.end(), std::greater<>()))
      throw Error(ErrorKind::MalformedResponse, "top logprobs not sorted descending");
    for (double lp : t.top_logprobs)
      if (std::isnan(lp) || lp > 0.0) throw Error(ErrorKind::MalformedResponse, "top logprob must be <= 0");
  }
}

GenerationResult generate(VlmBackend& backend, const GenerationRequest& req) {
  validate(req);
  auto result = backend.generate(req);
  validate(result);
  return result;
}

std::string entailment_input(std::string_view candidate, std::string_view context) {
  if (context.empty()) return std::string(candidate);
  std::string out = "Question: ";
  out += context;
  out += " Answer: ";
  out += candidate;
  return out;
}

bool semantically_equivalent(NliBackend& backend, std::string_view a, std::string_view b,
                             std::string_view context) {
  if (a.empty() || b.empty()) return a.empty() && b.empty();
  auto x = entailment_input(a, context);
  auto y = entailment_input(b, context);
  if (x == y) return true;
  if (y < x) std::swap(x, y);
  const auto v = backend.entail(x, y);
  return v.forward && v.backward;
}

std::optional<nlohmann::json> extract_json(std::string_view text) {
  auto parsed = nlohmann::json::parse(text, nullptr, false);
  if (!parsed.is_discarded()) return parsed;
  const auto open = text.find_first_of("{[");
  if (open == std::string_view::npos) return std::nullopt;
  const char close = text[open] == '{' ? '}' : ']';
  const auto end = text.rfind(close);
  if (end == std::string_view::npos || end < open) return std::nullopt;
  parsed = nlohmann::json::parse(text.substr(open, end - open + 1), nullptr, false);
  if (parsed.is_discarded()) return std::nullopt;
  return parsed;
}

nlohmann::json llm_structured(LlmBackend& backend, const TemplateRegistry& templates,
                              const std::string& template_id,
                              const std::map<std::string, std::string>& inputs) {
  const auto& tpl = templates.get(template_id);
  for (const auto& [key, value] : inputs)
    if (blank(value)) throw Error(ErrorKind::SchemaViolation, "empty input '" + key + "'");

  LlmRequest req;
  req.template_id = template_id;
  req.inputs = inputs;
  req.prompt = tpl.render(inputs);

  std::string violation;
  for (int attempt = 0; attempt < 2; ++attempt) {
    req.attempt = attempt;
    const auto text = backend.complete(req);
    if (auto doc = extract_json(text)) {
      violation = tpl.check_schema(*doc);
      if (violation.empty()) return *doc;
    } else {
      violation = "reply is not valid JSON";
    }
    req.previous_output = text;
  }
  throw Error(ErrorKind::SchemaViolation, template_id + ": " + violation);
}

}  // namespace univrse
