// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <atomic>
#include <chrono>
#include <memory>
#include <string>
#include <thread>

#include "univrse/scripted.hpp"

namespace httplib {
class Server;
}

namespace univrse {

/// Serves a Script as a local OpenAI-compatible endpoint:
///   POST /v1/chat/completions, GET /v1/models.
/// Requests carrying `metadata.univrse_task` ("vlm", "nli", "llm") are routed
/// to the matching script section; untagged requests are VLM lookups keyed by
/// the image digest and prompt text.
class MockServer {
 public:
  explicit MockServer(std::shared_ptr<const Script> script);
  ~MockServer();
  MockServer(const MockServer&) = delete;
  MockServer& operator=(const MockServer&) = delete;

  /// Binds to 127.0.0.1 on the given port (0 = any free port) and serves on a
  /// background thread. Returns the bound port.
  int start(int port = 0, const std::string& host = "127.0.0.1");
  /// Blocks the calling thread; used by the CLI.
  void listen_blocking(int port, const std::string& host);
  void stop();

  std::string endpoint() const;
  void set_latency(std::chrono::milliseconds latency) { latency_ms_ = latency.count(); }

  std::size_t requests_served() const { return served_.load(); }
  std::size_t max_in_flight() const { return max_in_flight_.load(); }

 private:
  void install_routes();

  std::shared_ptr<const Script> script_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
  std::string host_;
  int port_ = 0;
  std::atomic<long long> latency_ms_{0};
  std::atomic<std::size_t> served_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> max_in_flight_{0};
};

}  // namespace univrse
