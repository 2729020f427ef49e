// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include <json.hpp>

#include "univrse/backends.hpp"
#include "univrse/parallel.hpp"
#include "univrse/templates.hpp"

namespace univrse {

/// Posts OpenAI-compatible chat-completions requests. Retries transport
/// errors, HTTP 429 and 5xx with exponential backoff; at most `parallelism`
/// requests are in flight per client.
class ChatClient {
 public:
  explicit ChatClient(BackendConfig cfg);

  nlohmann::json post_chat(nlohmann::json body);
  /// GET {endpoint}/models; throws BootstrapFailure when unreachable.
  void probe();

  const BackendConfig& config() const { return cfg_; }

 private:
  BackendConfig cfg_;
  std::string scheme_host_port_;
  std::string base_path_;
  std::string api_key_;
  ConcurrencyLimiter limiter_;
};

class HttpVlm : public VlmBackend {
 public:
  explicit HttpVlm(BackendConfig cfg) : client_(std::make_shared<ChatClient>(std::move(cfg))) {}
  GenerationResult generate(const GenerationRequest& req) override;
  std::string id() const override;
  ChatClient& client() { return *client_; }

  static nlohmann::json build_body(const BackendConfig& cfg, const GenerationRequest& req);
  static GenerationResult parse_response(const nlohmann::json& resp);

 private:
  std::shared_ptr<ChatClient> client_;
};

/// Entailment as a classification prompt: one request per direction.
class HttpNli : public NliBackend {
 public:
  HttpNli(BackendConfig cfg, std::shared_ptr<const TemplateRegistry> templates)
      : client_(std::make_shared<ChatClient>(std::move(cfg))), templates_(std::move(templates)) {}
  EntailmentVerdict entail(std::string_view premise, std::string_view hypothesis) override;
  std::string id() const override;
  ChatClient& client() { return *client_; }

 private:
  bool entails(std::string_view premise, std::string_view hypothesis);

  std::shared_ptr<ChatClient> client_;
  std::shared_ptr<const TemplateRegistry> templates_;
};

class HttpLlm : public LlmBackend {
 public:
  explicit HttpLlm(BackendConfig cfg) : client_(std::make_shared<ChatClient>(std::move(cfg))) {}
  std::string complete(const LlmRequest& req) override;
  std::string id() const override;
  ChatClient& client() { return *client_; }

 private:
  std::shared_ptr<ChatClient> client_;
};

}  // namespace univrse
