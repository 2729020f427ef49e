// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/http_backend.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include "univrse/digest.hpp"
#include "univrse/error.hpp"

namespace univrse {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::unique_ptr<httplib::Client> make_client(const std::string& shp, const BackendConfig& cfg) {
  auto cli = std::make_unique<httplib::Client>(shp);
  const auto secs = static_cast<time_t>(cfg.timeout_s);
  const auto usecs = static_cast<time_t>((cfg.timeout_s - static_cast<double>(secs)) * 1e6);
  cli->set_connection_timeout(secs, usecs);
  cli->set_read_timeout(secs, usecs);
  cli->set_write_timeout(secs, usecs);
  return cli;
}

double read_logprob(const nlohmann::json& v) {
  if (v.is_null()) return kNegInf;
  double lp = v.get<double>();
  // Servers occasionally report tiny positive values from float round-off.
  if (lp > 0.0 && lp < 1e-4) lp = 0.0;
  return lp;
}

std::string message_content(const nlohmann::json& resp) {
  try {
    const auto& content = resp.at("choices").at(0).at("message").at("content");
    return content.is_null() ? std::string() : content.get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("chat response: ") + e.what());
  }
}

}  // namespace

ChatClient::ChatClient(BackendConfig cfg) : cfg_(std::move(cfg)), limiter_(static_cast<std::size_t>(cfg_.parallelism)) {
  validate(cfg_);
  const auto scheme_end = cfg_.endpoint.find("://");
  if (scheme_end == std::string::npos)
    throw Error(ErrorKind::ConfigError, "endpoint needs a scheme: " + cfg_.endpoint);
  const auto path_start = cfg_.endpoint.find('/', scheme_end + 3);
  scheme_host_port_ = cfg_.endpoint.substr(0, path_start);
  base_path_ = path_start == std::string::npos ? "" : cfg_.endpoint.substr(path_start);
  while (!base_path_.empty() && base_path_.back() == '/') base_path_.pop_back();
  if (!cfg_.api_key_env.empty()) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key) throw Error(ErrorKind::ConfigError, "environment variable " + cfg_.api_key_env + " is not set");
    api_key_ = key;
  }
}

nlohmann::json ChatClient::post_chat(nlohmann::json body) {
  if (!body.contains("model")) body["model"] = cfg_.model;
  const std::string payload = body.dump();
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  ErrorKind last_kind = ErrorKind::BackendError;
  std::string last_message;
  for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
    if (attempt > 0) {
      const double wait = cfg_.backoff_base_s * std::pow(2.0, attempt - 1);
      std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    }
    httplib::Result res;
    {
      ConcurrencyLimiter::Permit permit(limiter_);
      auto cli = make_client(scheme_host_port_, cfg_);
      res = cli->Post(base_path_ + "/chat/completions", headers, payload, "application/json");
    }
    if (!res) {
      const auto err = res.error();
      last_kind = (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read)
                      ? ErrorKind::Timeout
                      : ErrorKind::BackendError;
      last_message = "transport: " + httplib::to_string(err);
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403)
      throw Error(ErrorKind::AuthFailure, "endpoint rejected credentials (HTTP " + std::to_string(status) + ")");
    if (status == 429 || status >= 500) {
      last_kind = ErrorKind::BackendError;
      last_message = "HTTP " + std::to_string(status);
      continue;
    }
    auto doc = nlohmann::json::parse(res->body, nullptr, false);
    if (status != 200) {
      if (!doc.is_discarded() && doc.contains("error") && doc["error"].value("type", "") == "script_miss")
        throw Error(ErrorKind::ScriptMiss, doc["error"].value("message", "script miss"));
      throw Error(ErrorKind::BackendError, "HTTP " + std::to_string(status) + ": " + res->body.substr(0, 200));
    }
    if (doc.is_discarded()) throw Error(ErrorKind::MalformedResponse, "response body is not JSON");
    return doc;
  }
  throw Error(last_kind, last_message + " after " + std::to_string(cfg_.max_retries + 1) + " attempts");
}

void ChatClient::probe() {
  auto cli = make_client(scheme_host_port_, cfg_);
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = cli->Get(base_path_ + "/models", headers);
  if (!res) throw Error(ErrorKind::BootstrapFailure, cfg_.endpoint + " unreachable: " + httplib::to_string(res.error()));
  if (res->status == 401 || res->status == 403) throw Error(ErrorKind::AuthFailure, cfg_.endpoint + " rejected credentials");
  if (res->status >= 500) throw Error(ErrorKind::BootstrapFailure, cfg_.endpoint + " answered HTTP " + std::to_string(res->status));
}

nlohmann::json HttpVlm::build_body(const BackendConfig& cfg, const GenerationRequest& req) {
  auto content = nlohmann::json::array();
  content.push_back({{"type", "text"}, {"text", req.prompt}});
  if (req.image_png)
    content.push_back({{"type", "image_url"},
                       {"image_url", {{"url", "data:image/png;base64," + base64_encode(*req.image_png)}}}});
  nlohmann::json body = {{"model", cfg.model},
                         {"messages", {{{"role", "user"}, {"content", content}}}},
                         {"temperature", req.temperature},
                         {"max_tokens", req.max_tokens},
                         {"logprobs", true},
                         {"top_logprobs", req.top_logprobs}};
  if (req.seed) body["seed"] = *req.seed;
  if (cfg.send_tags)
    body["metadata"] = {{"univrse_task", "vlm"},
                        {"branch", req.tags.branch},
                        {"sample_index", std::to_string(req.tags.sample_index)}};
  return body;
}

GenerationResult HttpVlm::parse_response(const nlohmann::json& resp) {
  GenerationResult out;
  out.text = message_content(resp);
  const auto& choice = resp.at("choices").at(0);
  const bool has_logprobs = choice.contains("logprobs") && choice["logprobs"].is_object() &&
                            choice["logprobs"].contains("content") && choice["logprobs"]["content"].is_array();
  if (!has_logprobs) {
    if (out.text.empty()) return out;
    throw Error(ErrorKind::MalformedResponse, "endpoint returned no logprobs");
  }
  try {
    for (const auto& t : choice["logprobs"]["content"]) {
      TokenLogprob tok;
      tok.logprob = read_logprob(t.at("logprob"));
      for (const auto& alt : t.value("top_logprobs", nlohmann::json::array()))
        tok.top_logprobs.push_back(read_logprob(alt.at("logprob")));
      if (tok.top_logprobs.empty()) tok.top_logprobs.push_back(tok.logprob);
      std::sort(tok.top_logprobs.begin(), tok.top_logprobs.end(), std::greater<>());
      out.tokens.push_back(std::move(tok));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::MalformedResponse, std::string("logprobs: ") + e.what());
  }
  return out;
}

GenerationResult HttpVlm::generate(const GenerationRequest& req) {
  return parse_response(client_->post_chat(build_body(client_->config(), req)));
}

std::string HttpVlm::id() const { return "http:" + client_->config().model + "@" + client_->config().endpoint; }

bool HttpNli::entails(std::string_view premise, std::string_view hypothesis) {
  const auto& tpl = templates_->get(templates::kEntailment);
  const std::string p(premise), h(hypothesis);
  nlohmann::json body = {{"messages", {{{"role", "user"}, {"content", tpl.render({{"premise", p}, {"hypothesis", h}})}}}},
                         {"temperature", 0.0},
                         {"max_tokens", 16}};
  if (client_->config().send_tags)
    body["metadata"] = {{"univrse_task", "nli"}, {"premise", p}, {"hypothesis", h}};
  const auto text = message_content(client_->post_chat(std::move(body)));
  if (auto doc = extract_json(text); doc && doc->is_object() && doc->contains("label") && (*doc)["label"].is_string())
    return (*doc)["label"].get<std::string>() == "entailment";
  throw Error(ErrorKind::MalformedResponse, "entailment reply lacks a label");
}

EntailmentVerdict HttpNli::entail(std::string_view premise, std::string_view hypothesis) {
  return {entails(premise, hypothesis), entails(hypothesis, premise)};
}

std::string HttpNli::id() const { return "http:" + client_->config().model + "@" + client_->config().endpoint; }

std::string HttpLlm::complete(const LlmRequest& req) {
  auto messages = nlohmann::json::array({{{"role", "user"}, {"content", req.prompt}}});
  if (req.attempt > 0) {
    messages.push_back({{"role", "assistant"}, {"content", req.previous_output}});
    messages.push_back({{"role", "user"},
                        {"content", "That reply was not valid JSON in the requested form. Reply again with JSON only."}});
  }
  nlohmann::json body = {{"messages", messages}, {"temperature", 0.0}, {"max_tokens", 2048}};
  if (client_->config().send_tags)
    body["metadata"] = {{"univrse_task", "llm"},
                        {"template_id", req.template_id},
                        {"inputs", nlohmann::json(req.inputs).dump()},
                        {"attempt", std::to_string(req.attempt)}};
  return message_content(client_->post_chat(std::move(body)));
}

std::string HttpLlm::id() const { return "http:" + client_->config().model + "@" + client_->config().endpoint; }

}  // namespace univrse
