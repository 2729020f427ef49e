// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/config.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "univrse/digest.hpp"
#include "univrse/error.hpp"
#include "univrse/toml_lite.hpp"

namespace univrse {
namespace {

const std::set<std::string> kKnownKeys{
    "seed",          "samples",         "temperature",       "lambda",       "transform_preset",
    "distortion_preset", "placement",   "length_normalize",  "raw_masses",   "question_as_context",
    "binarize_threshold", "response_temperature", "max_tokens", "response_max_tokens", "top_logprobs",
    "record_workers", "sample_workers", "claim_workers",     "methods",      "templates",
    "backends"};

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw Error(ErrorKind::ConfigError, std::string("field '") + key + "' has the wrong type");
  }
}

BackendConfig backend_from(const nlohmann::json& j, const char* name) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, std::string("backends.") + name + " must be a table");
  try {
    return BackendConfig::from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("backends.") + name + ": " + e.what());
  }
}

void resolve(std::string& path, const std::filesystem::path& base) {
  if (!path.empty() && std::filesystem::path(path).is_relative()) path = (base / path).lexically_normal().string();
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw Error(ErrorKind::ConfigError, "config must be a table");
  for (const auto& [key, _] : j.items())
    if (!kKnownKeys.count(key)) throw Error(ErrorKind::ConfigError, "unknown config key '" + key + "'");
  RunConfig c;
  if (j.contains("seed")) {
    const auto& s = j.at("seed");
    if (s.is_number_unsigned())
      c.seed = s.get<std::uint64_t>();
    else if (s.is_number_integer() && s.get<std::int64_t>() >= 0)
      c.seed = static_cast<std::uint64_t>(s.get<std::int64_t>());
    else
      throw Error(ErrorKind::ConfigError, "seed must be a non-negative integer");
  }
  read(j, "samples", c.samples);
  read(j, "temperature", c.temperature);
  read(j, "lambda", c.lambda);
  read(j, "transform_preset", c.transform_preset);
  read(j, "distortion_preset", c.distortion_preset);
  if (j.contains("placement")) {
    try {
      c.placement = parse_placement(j.at("placement").get<std::string>());
    } catch (const std::exception& e) {
      throw Error(ErrorKind::ConfigError, std::string("placement: ") + e.what());
    }
  }
  read(j, "length_normalize", c.length_normalize);
  read(j, "raw_masses", c.raw_masses);
  read(j, "question_as_context", c.question_as_context);
  read(j, "binarize_threshold", c.binarize_threshold);
  read(j, "response_temperature", c.response_temperature);
  read(j, "max_tokens", c.max_tokens);
  read(j, "response_max_tokens", c.response_max_tokens);
  read(j, "top_logprobs", c.top_logprobs);
  read(j, "record_workers", c.record_workers);
  read(j, "sample_workers", c.sample_workers);
  read(j, "claim_workers", c.claim_workers);
  read(j, "templates", c.templates);
  if (j.contains("methods")) {
    std::vector<std::string> names;
    read(j, "methods", names);
    c.methods.clear();
    for (const auto& n : names) {
      try {
        const auto m = parse_method(n);
        if (std::find(c.methods.begin(), c.methods.end(), m) != c.methods.end())
          throw Error(ErrorKind::ConfigError, "method listed twice: " + n);
        c.methods.push_back(m);
      } catch (const Error& e) {
        if (e.kind() == ErrorKind::ConfigError) throw;
        throw Error(ErrorKind::ConfigError, "unknown method '" + n + "'");
      }
    }
  }
  if (j.contains("backends")) {
    const auto& b = j.at("backends");
    if (!b.is_object()) throw Error(ErrorKind::ConfigError, "backends must be a table");
    for (const auto& [key, _] : b.items())
      if (key != "vlm" && key != "nli" && key != "llm" && key != "auxiliary")
        throw Error(ErrorKind::ConfigError, "unknown backend role '" + key + "'");
    if (b.contains("vlm")) c.vlm = backend_from(b.at("vlm"), "vlm");
    if (b.contains("nli")) c.nli = backend_from(b.at("nli"), "nli");
    if (b.contains("llm")) c.llm = backend_from(b.at("llm"), "llm");
    if (b.contains("auxiliary")) {
      const auto& aux = b.at("auxiliary");
      if (!aux.is_array()) throw Error(ErrorKind::ConfigError, "backends.auxiliary must be an array of tables");
      for (const auto& a : aux) c.auxiliary.push_back(backend_from(a, "auxiliary"));
    }
  }
  validate(c);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  auto doc = toml::parse_file(path);
  const auto base = path.parent_path();
  auto fix = [&](nlohmann::json& b) {
    if (b.is_object() && b.contains("script") && b["script"].is_string()) {
      auto s = b["script"].get<std::string>();
      resolve(s, base);
      b["script"] = s;
    }
  };
  if (doc.contains("backends") && doc["backends"].is_object()) {
    auto& b = doc["backends"];
    for (const char* role : {"vlm", "nli", "llm"})
      if (b.contains(role)) fix(b[role]);
    if (b.contains("auxiliary") && b["auxiliary"].is_array())
      for (auto& a : b["auxiliary"]) fix(a);
  }
  if (doc.contains("templates") && doc["templates"].is_string()) {
    auto t = doc["templates"].get<std::string>();
    resolve(t, base);
    doc["templates"] = t;
  }
  return from_json(doc);
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j;
  j["seed"] = seed;
  j["samples"] = samples;
  j["temperature"] = temperature;
  j["lambda"] = lambda;
  j["transform_preset"] = transform_preset;
  j["distortion_preset"] = distortion_preset;
  j["placement"] = std::string(to_string(placement));
  j["length_normalize"] = length_normalize;
  j["raw_masses"] = raw_masses;
  j["question_as_context"] = question_as_context;
  j["binarize_threshold"] = binarize_threshold;
  j["response_temperature"] = response_temperature;
  j["max_tokens"] = max_tokens;
  j["response_max_tokens"] = response_max_tokens;
  j["top_logprobs"] = top_logprobs;
  j["record_workers"] = record_workers;
  j["sample_workers"] = sample_workers;
  j["claim_workers"] = claim_workers;
  auto& ms = j["methods"] = nlohmann::json::array();
  for (auto m : methods) ms.push_back(std::string(to_string(m)));
  j["templates"] = templates;
  auto& b = j["backends"];
  b["vlm"] = vlm.to_json();
  b["nli"] = nli.to_json();
  b["llm"] = llm.to_json();
  b["auxiliary"] = nlohmann::json::array();
  for (const auto& a : auxiliary) b["auxiliary"].push_back(a.to_json());
  return j;
}

bool RunConfig::enabled(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

VseConfig RunConfig::vse_config() const {
  VseConfig v;
  v.spd.samples = samples;
  v.spd.temperature = temperature;
  v.spd.max_tokens = max_tokens;
  v.spd.top_logprobs = top_logprobs;
  v.spd.length_normalize = length_normalize;
  v.spd.raw_masses = raw_masses;
  v.spd.question_as_context = question_as_context;
  v.spd.workers = static_cast<std::size_t>(sample_workers);
  v.weak = weak_transform_preset(parse_transform_preset(transform_preset));
  v.distortion = univrse::distortion_preset(parse_noise_preset(distortion_preset));
  v.placement = placement;
  v.lambda = lambda;
  return v;
}

LongformConfig RunConfig::longform_config() const {
  LongformConfig l;
  l.vse = vse_config();
  l.report_temperature = response_temperature;
  l.claim_workers = static_cast<std::size_t>(claim_workers);
  return l;
}

void validate(const RunConfig& c) {
  auto bad = [](const std::string& msg) { throw Error(ErrorKind::ConfigError, msg); };
  if (c.samples < 2) bad("samples must be >= 2");
  if (!(c.temperature > 0.0) || !std::isfinite(c.temperature)) bad("temperature must be > 0");
  if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) bad("lambda must be >= 0");
  if (!(c.binarize_threshold >= 0.0 && c.binarize_threshold < 1.0)) bad("binarize_threshold must be in [0, 1)");
  if (!(c.response_temperature >= 0.0)) bad("response_temperature must be >= 0");
  if (c.max_tokens < 1 || c.response_max_tokens < 1) bad("max_tokens must be >= 1");
  if (c.top_logprobs < 1 || c.top_logprobs > 20) bad("top_logprobs must be in [1, 20]");
  if (c.record_workers < 1 || c.sample_workers < 1 || c.claim_workers < 1) bad("worker counts must be >= 1");
  if (c.methods.empty()) bad("methods must not be empty");
  try {
    parse_transform_preset(c.transform_preset);
  } catch (const std::exception&) {
    bad("unknown transform_preset '" + c.transform_preset + "'");
  }
  try {
    parse_noise_preset(c.distortion_preset);
  } catch (const std::exception&) {
    bad("unknown distortion_preset '" + c.distortion_preset + "'");
  }
  auto check = [&](const BackendConfig& b, const std::string& role) {
    try {
      validate(b);
    } catch (const Error& e) {
      bad("backends." + role + ": " + e.what());
    }
  };
  check(c.vlm, "vlm");
  check(c.nli, "nli");
  check(c.llm, "llm");
  for (const auto& a : c.auxiliary) check(a, "auxiliary");
}

std::string config_hash(const RunConfig& cfg, const std::map<std::string, std::string>& template_hashes) {
  nlohmann::json doc;
  doc["config"] = cfg.to_json();
  doc["templates"] = template_hashes;
  // nlohmann objects are key-sorted, so dump() is canonical.
  return sha256_hex(doc.dump());
}

}  // namespace univrse
