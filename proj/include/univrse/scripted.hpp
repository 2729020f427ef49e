// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "univrse/backends.hpp"

namespace univrse {

/// Deterministic answers for all three backend roles, loaded from a JSON script:
///
///   {"vlm": [{"image_digest": "<sha256 hex>" | "none" | "*",
///             "prompt": "...", "branch": "original" | ... | "*",
///             "text": "...", "logprobs": [...], "top_logprobs": [[...]]}
///            or {..., "responses": [{"text", "logprobs", "top_logprobs"}, ...]}],
///    "nli": [{"premise", "hypothesis", "forward", "backward"}],
///    "nli_default": {"forward": false, "backward": false},   (optional)
///    "llm": [{"template_id", "inputs": {...}, "output": <json or text>}
///            or {..., "outputs": [first attempt, repair attempt]}]}
///
/// Exact digests win over "*"; an exact branch wins over "*". With a
/// `responses` list, sample i receives responses[i % size]. A logprob of
/// null or "-inf" stands for negative infinity.
class Script {
 public:
  static Script parse(const nlohmann::json& doc);
  static Script load(const std::filesystem::path& path);

  GenerationResult generate(const std::optional<std::string>& image_digest, const std::string& prompt,
                            const RequestTags& tags) const;
  EntailmentVerdict entail(std::string_view premise, std::string_view hypothesis) const;
  std::string complete(const std::string& template_id, const std::map<std::string, std::string>& inputs,
                       int attempt) const;

  const std::string& digest() const { return digest_; }

 private:
  struct VlmEntry {
    std::string image_digest;
    std::string prompt;
    std::string branch;
    std::vector<GenerationResult> responses;
  };
  struct NliEntry {
    std::string premise;
    std::string hypothesis;
    EntailmentVerdict verdict;
  };
  struct LlmEntry {
    std::string template_id;
    std::map<std::string, std::string> inputs;
    std::vector<std::string> outputs;
  };

  std::vector<VlmEntry> vlm_;
  std::vector<NliEntry> nli_;
  std::optional<EntailmentVerdict> nli_default_;
  std::vector<LlmEntry> llm_;
  std::string digest_;
};

/// Helpers for building scripts in code.
nlohmann::json script_logprobs(const std::vector<double>& logprobs);
GenerationResult parse_scripted_result(const nlohmann::json& j);

class ScriptedVlm : public VlmBackend {
 public:
  explicit ScriptedVlm(std::shared_ptr<const Script> script) : script_(std::move(script)) {}
  GenerationResult generate(const GenerationRequest& req) override;
  std::string id() const override { return "scripted:" + script_->digest().substr(0, 12); }

 private:
  std::shared_ptr<const Script> script_;
};

class ScriptedNli : public NliBackend {
 public:
  explicit ScriptedNli(std::shared_ptr<const Script> script) : script_(std::move(script)) {}
  EntailmentVerdict entail(std::string_view premise, std::string_view hypothesis) override {
    return script_->entail(premise, hypothesis);
  }
  std::string id() const override { return "scripted:" + script_->digest().substr(0, 12); }

 private:
  std::shared_ptr<const Script> script_;
};

class ScriptedLlm : public LlmBackend {
 public:
  explicit ScriptedLlm(std::shared_ptr<const Script> script) : script_(std::move(script)) {}
  std::string complete(const LlmRequest& req) override {
    return script_->complete(req.template_id, req.inputs, req.attempt);
  }
  std::string id() const override { return "scripted:" + script_->digest().substr(0, 12); }

 private:
  std::shared_ptr<const Script> script_;
};

}  // namespace univrse
