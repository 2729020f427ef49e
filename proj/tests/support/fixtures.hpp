// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

// Shared helpers for the unit, property and acceptance tests.

#pragma once

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "univrse/backends.hpp"
#include "univrse/config.hpp"
#include "univrse/image.hpp"

namespace univrse::testing {

namespace fs = std::filesystem;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

class TempDir {
 public:
  TempDir() {
    static std::atomic<int> counter{0};
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("univrse-test-" + std::to_string(rd()) + "-" + std::to_string(counter.fetch_add(1)));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& leaf) const { return path_ / leaf; }

 private:
  fs::path path_;
};

inline ImageTensor gradient_image(int w, int h, int c = 3, unsigned salt = 0) {
  ImageTensor img;
  img.width = w;
  img.height = h;
  img.channels = c;
  img.pixels.resize(static_cast<std::size_t>(w) * h * c);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      for (int k = 0; k < c; ++k)
        img.pixels[(static_cast<std::size_t>(y) * w + x) * c + k] =
            static_cast<float>(((x * 7 + y * 13 + k * 29 + salt * 31) % 256) / 255.0);
  return img;
}

inline void write_file(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

inline void write_png(const fs::path& p, const ImageTensor& img) {
  const auto bytes = encode_png(img);
  std::ofstream(p, std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()),
                                           static_cast<std::streamsize>(bytes.size()));
}

inline GenerationResult result(const std::string& text, const std::vector<double>& logprobs) {
  GenerationResult r;
  r.text = text;
  for (double lp : logprobs) r.tokens.push_back({lp, {lp}});
  return r;
}

/// Script entry response: {"text", "logprobs"} with -inf written as a string.
inline nlohmann::json scripted(const std::string& text, const std::vector<double>& logprobs) {
  auto lps = nlohmann::json::array();
  for (double lp : logprobs) lps.push_back(std::isinf(lp) ? nlohmann::json("-inf") : nlohmann::json(lp));
  return {{"text", text}, {"logprobs", lps}};
}

class FnVlm : public VlmBackend {
 public:
  using Fn = std::function<GenerationResult(const GenerationRequest&)>;
  explicit FnVlm(Fn fn) : fn_(std::move(fn)) {}
  GenerationResult generate(const GenerationRequest& req) override {
    ++calls;
    return fn_(req);
  }
  std::string id() const override { return "fn-vlm"; }
  std::atomic<int> calls{0};

 private:
  Fn fn_;
};

class FnNli : public NliBackend {
 public:
  using Fn = std::function<EntailmentVerdict(std::string_view, std::string_view)>;
  explicit FnNli(Fn fn) : fn_(std::move(fn)) {}
  EntailmentVerdict entail(std::string_view p, std::string_view h) override {
    ++calls;
    return fn_(p, h);
  }
  std::string id() const override { return "fn-nli"; }
  std::atomic<int> calls{0};

 private:
  Fn fn_;
};

/// Equivalence by a key function applied to the answer part of the NLI input.
inline FnNli::Fn nli_by_key(std::function<std::string(std::string_view)> key) {
  return [key](std::string_view p, std::string_view h) {
    auto strip = [](std::string_view s) {
      const auto at = s.rfind(" Answer: ");
      return at == std::string_view::npos ? s : s.substr(at + 9);
    };
    const bool same = key(strip(p)) == key(strip(h));
    return EntailmentVerdict{same, same};
  };
}

class FnLlm : public LlmBackend {
 public:
  using Fn = std::function<std::string(const LlmRequest&)>;
  explicit FnLlm(Fn fn) : fn_(std::move(fn)) {}
  std::string complete(const LlmRequest& req) override {
    ++calls;
    return fn_(req);
  }
  std::string id() const override { return "fn-llm"; }
  std::atomic<int> calls{0};

 private:
  Fn fn_;
};

/// Script answering `prompt` with per-branch response lists (any image).
inline nlohmann::json branch_script(const std::string& prompt, const nlohmann::json& original,
                                    const nlohmann::json& distorted) {
  return {{"vlm",
           {{{"image_digest", "*"}, {"prompt", prompt}, {"branch", "original"}, {"responses", original}},
            {{"image_digest", "*"}, {"prompt", prompt}, {"branch", "distorted"}, {"responses", distorted}}}},
          {"nli_default", {{"forward", false}, {"backward", false}}}};
}

/// Both branches keep answering "A"; "B" is sampled with probability 0.
inline nlohmann::json prior_driven_script(const std::string& prompt) {
  const nlohmann::json both = {scripted("A", {0.0}), scripted("B", {kNegInf})};
  return branch_script(prompt, both, both);
}

/// The answer flips from "A" to "B" once the image is distorted.
inline nlohmann::json grounded_script(const std::string& prompt) {
  return branch_script(prompt, {scripted("A", {0.0}), scripted("B", {kNegInf})},
                       {scripted("A", {kNegInf}), scripted("B", {0.0})});
}

/// Ten-record VQA fixture. Six records are answered correctly and consistently
/// (their answers move when the image is distorted), two are hallucinated but
/// confident and unchanged under distortion, two are hallucinated and
/// uncertain.
struct E2eFixture {
  fs::path dir;
  fs::path dataset;
  fs::path script;
  nlohmann::json script_json;
  std::vector<std::string> ids;
  std::set<std::string> hallucinated;
  std::set<std::string> overconfident;
};

inline E2eFixture build_e2e_fixture(const fs::path& dir) {
  E2eFixture f;
  f.dir = dir;
  fs::create_directories(dir / "images");
  nlohmann::json script{{"vlm", nlohmann::json::array()},
                        {"llm", nlohmann::json::array()},
                        {"nli_default", {{"forward", false}, {"backward", false}}}};
  std::string dataset;
  auto add_vlm = [&](const std::string& prompt, const std::string& branch, nlohmann::json responses) {
    script["vlm"].push_back({{"image_digest", "*"}, {"prompt", prompt}, {"branch", branch}, {"responses", responses}});
  };
  for (int i = 0; i < 10; ++i) {
    char id[8];
    std::snprintf(id, sizeof id, "r%02d", i);
    f.ids.push_back(id);
    const std::string question = "Q" + std::to_string(i) + ": what does the image show?";
    const std::string reference = "finding " + std::to_string(i);
    const std::string image = "images/" + std::string(id) + ".png";
    write_png(dir / image, gradient_image(24, 20, 3, static_cast<unsigned>(i)));
    dataset += nlohmann::json{{"id", id}, {"image_path", image}, {"task", "vqa"}, {"question", question},
                              {"reference", reference}}
                   .dump() +
               "\n";

    const bool correct = i < 6;
    const bool overconfident = i == 6 || i == 7;
    std::string answer;
    auto original = nlohmann::json::array();
    auto distorted = nlohmann::json::array();
    if (correct) {
      answer = "A" + std::to_string(i);
      for (int k = 0; k < 9; ++k) original.push_back(scripted(answer, {-0.05, -0.05}));
      original.push_back(scripted(answer + " alt", {std::log(0.1)}));
      for (int k = 0; k < 10; ++k) distorted.push_back(scripted("B" + std::to_string(i), {-0.1}));
    } else if (overconfident) {
      answer = "X" + std::to_string(i);
      for (int k = 0; k < 9; ++k) original.push_back(scripted(answer, {-0.01}));
      original.push_back(scripted("Y" + std::to_string(i), {-60.0}));
      distorted = original;
      f.overconfident.insert(id);
    } else {
      answer = "P" + std::to_string(i);
      for (int k = 0; k < 5; ++k) original.push_back(scripted(answer, {-0.7}));
      for (int k = 0; k < 5; ++k) original.push_back(scripted("Q" + std::to_string(i), {-0.7}));
      for (int k = 0; k < 10; ++k) distorted.push_back(scripted("R" + std::to_string(i), {-0.2}));
    }
    if (!correct) f.hallucinated.insert(id);

    auto response = scripted(answer, {-0.1, -0.3});
    response["top_logprobs"] = {{-0.1, -2.5}, {-0.3, -1.5}};
    add_vlm(question, "response", nlohmann::json::array({response}));
    add_vlm(question, "original", original);
    add_vlm(question, "distorted", distorted);
    add_vlm(question, "auxiliary",
            nlohmann::json::array({scripted(correct ? answer : "Z" + std::to_string(i), {-0.2})}));

    script["llm"].push_back({{"template_id", "decompose_claims.v1"},
                             {"inputs", {{"text", answer}}},
                             {"output", {{"claims", {answer}}}}});
    script["llm"].push_back({{"template_id", "decompose_facts.v1"},
                             {"inputs", {{"reference", reference}}},
                             {"output", {{"facts", {{{"text", reference}, {"kind", "instruction-answering"}}}}}}});
    nlohmann::json judgment{{"claim_index", 0}, {"verdict", correct ? "matched" : "hallucinated"}};
    judgment["fact_index"] = correct ? nlohmann::json(0) : nlohmann::json();
    script["llm"].push_back({{"template_id", "match_claims.v1"},
                             {"inputs", {{"claims", "0. " + answer + "\n"}, {"instruction", question}}},
                             {"output", {{"judgments", {judgment}}}}});
  }
  f.dataset = dir / "dataset.jsonl";
  write_file(f.dataset, dataset);
  f.script = dir / "script.json";
  f.script_json = script;
  write_file(f.script, script.dump(2));
  return f;
}

/// RunConfig for the fixture; `endpoint` empty selects in-process scripted
/// backends, otherwise HTTP clients pointed at a mock server.
inline RunConfig e2e_config(const E2eFixture& f, const std::string& endpoint = "", std::uint64_t seed = 20260101) {
  RunConfig cfg;
  cfg.seed = seed;
  cfg.record_workers = 4;
  BackendConfig b;
  if (endpoint.empty()) {
    b.kind = "mock";
    b.script = f.script.string();
  } else {
    b.kind = "http";
    b.endpoint = endpoint;
    b.model = "scripted";
    b.send_tags = true;
    b.max_retries = 0;
    b.timeout_s = 10;
    b.parallelism = 8;
  }
  cfg.vlm = cfg.nli = cfg.llm = b;
  cfg.auxiliary = {b};
  return cfg;
}

}  // namespace univrse::testing
