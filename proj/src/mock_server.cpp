// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/mock_server.hpp"

#include <httplib.h>

#include "univrse/digest.hpp"
#include "univrse/error.hpp"

namespace univrse {
namespace {

struct ParsedChat {
  std::string prompt;
  std::optional<std::string> image_digest;
};

ParsedChat parse_chat(const nlohmann::json& body) {
  ParsedChat out;
  const auto& messages = body.at("messages");
  for (auto it = messages.rbegin(); it != messages.rend(); ++it) {
    if ((*it).value("role", "") != "user") continue;
    const auto& content = (*it).at("content");
    if (content.is_string()) {
      out.prompt = content.get<std::string>();
    } else {
      for (const auto& part : content) {
        const auto type = part.value("type", "");
        if (type == "text") {
          out.prompt += part.at("text").get<std::string>();
        } else if (type == "image_url") {
          const auto url = part.at("image_url").at("url").get<std::string>();
          const auto comma = url.find(',');
          const auto bytes = base64_decode(std::string_view(url).substr(comma == std::string::npos ? 0 : comma + 1));
          out.image_digest = sha256_hex(bytes);
        }
      }
    }
    break;
  }
  return out;
}

nlohmann::json completion(const std::string& text, const GenerationResult* tokens) {
  nlohmann::json choice = {{"index", 0},
                           {"message", {{"role", "assistant"}, {"content", text}}},
                           {"finish_reason", "stop"}};
  if (tokens) {
    auto content = nlohmann::json::array();
    for (std::size_t i = 0; i < tokens->tokens.size(); ++i) {
      const auto& t = tokens->tokens[i];
      auto top = nlohmann::json::array();
      for (std::size_t k = 0; k < t.top_logprobs.size(); ++k)
        top.push_back({{"token", "alt" + std::to_string(k)}, {"logprob", t.top_logprobs[k]}});
      content.push_back({{"token", "t" + std::to_string(i)}, {"logprob", t.logprob}, {"top_logprobs", top}});
    }
    choice["logprobs"] = {{"content", content}};
  } else {
    choice["logprobs"] = nullptr;
  }
  return {{"id", "chatcmpl-mock"},
          {"object", "chat.completion"},
          {"model", "univrse-mock"},
          {"choices", nlohmann::json::array({choice})}};
}

}  // namespace

MockServer::MockServer(std::shared_ptr<const Script> script)
    : script_(std::move(script)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

MockServer::~MockServer() { stop(); }

void MockServer::install_routes() {
  auto chat = [this](const httplib::Request& req, httplib::Response& res) {
    const auto now = ++in_flight_;
    for (auto seen = max_in_flight_.load(); now > seen && !max_in_flight_.compare_exchange_weak(seen, now);) {
    }
    if (const auto ms = latency_ms_.load(); ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(ms));
    try {
      const auto body = nlohmann::json::parse(req.body);
      const auto chat = parse_chat(body);
      const auto meta = body.value("metadata", nlohmann::json::object());
      const auto task = meta.value("univrse_task", "vlm");
      nlohmann::json reply;
      if (task == "nli") {
        const auto v = script_->entail(meta.at("premise").get<std::string>(), meta.at("hypothesis").get<std::string>());
        reply = completion(nlohmann::json{{"label", v.forward ? "entailment" : "neutral"}}.dump(), nullptr);
      } else if (task == "llm") {
        const auto inputs = nlohmann::json::parse(meta.at("inputs").get<std::string>())
                                .get<std::map<std::string, std::string>>();
        const int attempt = std::stoi(meta.value("attempt", "0"));
        reply = completion(script_->complete(meta.at("template_id").get<std::string>(), inputs, attempt), nullptr);
      } else {
        RequestTags tags;
        tags.branch = meta.value("branch", "");
        tags.sample_index = std::stoul(meta.value("sample_index", "0"));
        const auto result = script_->generate(chat.image_digest, chat.prompt, tags);
        reply = completion(result.text, &result);
      }
      res.set_content(reply.dump(), "application/json");
    } catch (const Error& e) {
      res.status = e.kind() == ErrorKind::ScriptMiss ? 404 : 400;
      const char* type = e.kind() == ErrorKind::ScriptMiss ? "script_miss" : "invalid_request";
      res.set_content(nlohmann::json{{"error", {{"type", type}, {"message", e.what()}}}}.dump(), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(nlohmann::json{{"error", {{"type", "invalid_request"}, {"message", e.what()}}}}.dump(),
                      "application/json");
    }
    ++served_;
    --in_flight_;
  };
  server_->Post("/v1/chat/completions", chat);
  server_->Post("/chat/completions", chat);
  auto models = [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"object":"list","data":[{"id":"univrse-mock","object":"model"}]})", "application/json");
  };
  server_->Get("/v1/models", models);
  server_->Get("/models", models);
}

int MockServer::start(int port, const std::string& host) {
  host_ = host;
  port_ = port == 0 ? server_->bind_to_any_port(host) : (server_->bind_to_port(host, port) ? port : -1);
  if (port_ < 0) throw Error(ErrorKind::BootstrapFailure, "mock server cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return port_;
}

void MockServer::listen_blocking(int port, const std::string& host) {
  host_ = host;
  port_ = port;
  if (!server_->listen(host, port))
    throw Error(ErrorKind::BootstrapFailure, "mock server cannot listen on " + host + ":" + std::to_string(port));
}

void MockServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

std::string MockServer::endpoint() const { return "http://" + host_ + ":" + std::to_string(port_) + "/v1"; }

}  // namespace univrse
