// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/scripted.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <tuple>

#include "univrse/digest.hpp"
#include "univrse/error.hpp"

namespace univrse {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double parse_logprob(const nlohmann::json& v) {
  if (v.is_null()) return kNegInf;
  if (v.is_string()) {
    if (v.get<std::string>() == "-inf") return kNegInf;
    throw Error(ErrorKind::ConfigError, "logprob string must be \"-inf\"");
  }
  return v.get<double>();
}

}  // namespace

nlohmann::json script_logprobs(const std::vector<double>& logprobs) {
  auto out = nlohmann::json::array();
  for (double lp : logprobs) {
    if (std::isinf(lp) && lp < 0)
      out.push_back("-inf");
    else
      out.push_back(lp);
  }
  return out;
}

GenerationResult parse_scripted_result(const nlohmann::json& j) {
  GenerationResult r;
  r.text = j.value("text", "");
  const auto& lps = j.contains("logprobs") ? j.at("logprobs") : nlohmann::json::array();
  for (std::size_t i = 0; i < lps.size(); ++i) {
    TokenLogprob tok;
    tok.logprob = parse_logprob(lps[i]);
    if (j.contains("top_logprobs") && i < j.at("top_logprobs").size()) {
      for (const auto& v : j.at("top_logprobs")[i]) tok.top_logprobs.push_back(parse_logprob(v));
    } else {
      tok.top_logprobs.push_back(tok.logprob);
    }
    std::sort(tok.top_logprobs.begin(), tok.top_logprobs.end(), std::greater<>());
    r.tokens.push_back(std::move(tok));
  }
  return r;
}

Script Script::parse(const nlohmann::json& doc) {
  Script s;
  try {
    for (const auto& e : doc.value("vlm", nlohmann::json::array())) {
      VlmEntry entry;
      entry.image_digest = e.value("image_digest", "*");
      entry.prompt = e.at("prompt").get<std::string>();
      entry.branch = e.value("branch", "*");
      if (e.contains("responses")) {
        for (const auto& r : e.at("responses")) entry.responses.push_back(parse_scripted_result(r));
      } else {
        entry.responses.push_back(parse_scripted_result(e));
      }
      if (entry.responses.empty()) throw Error(ErrorKind::ConfigError, "vlm entry without responses");
      s.vlm_.push_back(std::move(entry));
    }
    for (const auto& e : doc.value("nli", nlohmann::json::array())) {
      s.nli_.push_back({e.at("premise").get<std::string>(), e.at("hypothesis").get<std::string>(),
                        {e.at("forward").get<bool>(), e.at("backward").get<bool>()}});
    }
    if (doc.contains("nli_default") && !doc.at("nli_default").is_null()) {
      const auto& d = doc.at("nli_default");
      s.nli_default_ = EntailmentVerdict{d.at("forward").get<bool>(), d.at("backward").get<bool>()};
    }
    for (const auto& e : doc.value("llm", nlohmann::json::array())) {
      LlmEntry entry;
      entry.template_id = e.at("template_id").get<std::string>();
      entry.inputs = e.value("inputs", nlohmann::json::object()).get<std::map<std::string, std::string>>();
      const auto raw = e.contains("outputs") ? e.at("outputs") : nlohmann::json::array({e.at("output")});
      for (const auto& o : raw) entry.outputs.push_back(o.is_string() ? o.get<std::string>() : o.dump());
      if (entry.outputs.empty()) throw Error(ErrorKind::ConfigError, "llm entry without outputs");
      s.llm_.push_back(std::move(entry));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, std::string("mock script: ") + e.what());
  }
  s.digest_ = sha256_hex(doc.dump());
  return s;
}

Script Script::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read mock script " + path.string());
  auto doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorKind::ConfigError, "mock script is not valid JSON: " + path.string());
  return parse(doc);
}

GenerationResult Script::generate(const std::optional<std::string>& image_digest, const std::string& prompt,
                                  const RequestTags& tags) const {
  const std::string digest = image_digest.value_or("none");
  const VlmEntry* best = nullptr;
  std::tuple<int, int> best_rank{0, 0};
  for (const auto& e : vlm_) {
    if (e.prompt != prompt) continue;
    const int d = e.image_digest == digest ? 2 : (e.image_digest == "*" ? 1 : 0);
    const int b = e.branch == tags.branch ? 2 : (e.branch == "*" ? 1 : 0);
    if (d == 0 || b == 0) continue;
    if (std::tuple{d, b} > best_rank) {
      best_rank = {d, b};
      best = &e;
    }
  }
  if (!best)
    throw Error(ErrorKind::ScriptMiss, "no vlm script for digest " + digest.substr(0, 12) + " prompt \"" +
                                           prompt + "\" branch " + tags.branch);
  return best->responses[tags.sample_index % best->responses.size()];
}

EntailmentVerdict Script::entail(std::string_view premise, std::string_view hypothesis) const {
  for (const auto& e : nli_) {
    if (e.premise == premise && e.hypothesis == hypothesis) return e.verdict;
    if (e.premise == hypothesis && e.hypothesis == premise) return {e.verdict.backward, e.verdict.forward};
  }
  if (premise == hypothesis) return {true, true};
  if (nli_default_) return *nli_default_;
  throw Error(ErrorKind::ScriptMiss,
              "no nli script for \"" + std::string(premise) + "\" / \"" + std::string(hypothesis) + "\"");
}

std::string Script::complete(const std::string& template_id, const std::map<std::string, std::string>& inputs,
                             int attempt) const {
  // An entry matches when every input it names agrees; the most specific wins.
  const LlmEntry* best = nullptr;
  for (const auto& e : llm_) {
    if (e.template_id != template_id) continue;
    const bool match = std::all_of(e.inputs.begin(), e.inputs.end(), [&](const auto& kv) {
      const auto it = inputs.find(kv.first);
      return it != inputs.end() && it->second == kv.second;
    });
    if (match && (!best || e.inputs.size() > best->inputs.size())) best = &e;
  }
  if (best) return best->outputs[std::min<std::size_t>(static_cast<std::size_t>(attempt), best->outputs.size() - 1)];
  throw Error(ErrorKind::ScriptMiss, "no llm script for template " + template_id);
}

GenerationResult ScriptedVlm::generate(const GenerationRequest& req) {
  std::optional<std::string> digest;
  if (req.image_png) digest = sha256_hex(*req.image_png);
  return script_->generate(digest, req.prompt, req.tags);
}

}  // namespace univrse
