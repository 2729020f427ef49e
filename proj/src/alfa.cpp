// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/alfa.hpp"

#include <algorithm>
#include <cctype>
#include <string>

#include "univrse/error.hpp"
#include "univrse/longform.hpp"

namespace univrse {
namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::string_view to_string(FactKind kind) {
  return kind == FactKind::InstructionAnswering ? "instruction-answering" : "contextual";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Matched: return "matched";
    case Verdict::Hallucinated: return "hallucinated";
    case Verdict::Extraneous: return "extraneous";
  }
  return "extraneous";
}

FactKind parse_fact_kind(std::string_view name) {
  if (name == "instruction-answering") return FactKind::InstructionAnswering;
  if (name == "contextual") return FactKind::Contextual;
  throw Error(ErrorKind::SchemaViolation, "unknown fact kind '" + std::string(name) + "'");
}

Verdict parse_verdict(std::string_view name) {
  if (name == "matched") return Verdict::Matched;
  if (name == "hallucinated") return Verdict::Hallucinated;
  if (name == "extraneous") return Verdict::Extraneous;
  throw Error(ErrorKind::SchemaViolation, "unknown verdict '" + std::string(name) + "'");
}

std::vector<AtomicFact> decompose_reference(const std::string& reference, const std::string& instruction,
                                            LlmBackend& llm, const TemplateRegistry& templates) {
  if (blank(reference)) throw Error(ErrorKind::EmptyReference, "reference answer is empty");
  const auto doc = llm_structured(llm, templates, templates::kDecomposeFacts,
                                  {{"reference", reference}, {"instruction", instruction}});
  std::vector<AtomicFact> facts;
  try {
    for (const auto& f : doc.at("facts")) {
      AtomicFact fact{f.at("text").get<std::string>(), parse_fact_kind(f.at("kind").get<std::string>())};
      if (blank(fact.text)) throw Error(ErrorKind::SchemaViolation, "fact text is empty");
      facts.push_back(std::move(fact));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("facts: ") + e.what());
  }
  if (facts.empty()) throw Error(ErrorKind::SchemaViolation, "reference decomposed into no facts");
  return facts;
}

std::vector<ClaimJudgment> match_claims(const std::vector<std::string>& claims, const std::vector<AtomicFact>& facts,
                                        const std::string& instruction, LlmBackend& llm,
                                        const TemplateRegistry& templates) {
  if (claims.empty()) throw Error(ErrorKind::EmptyJudgments, "no claims to match");
  std::string fact_lines, claim_lines;
  for (std::size_t i = 0; i < facts.size(); ++i)
    fact_lines += std::to_string(i) + ". [" + std::string(to_string(facts[i].kind)) + "] " + facts[i].text + "\n";
  for (std::size_t i = 0; i < claims.size(); ++i) claim_lines += std::to_string(i) + ". " + claims[i] + "\n";

  const auto doc = llm_structured(llm, templates, templates::kMatchClaims,
                                  {{"instruction", instruction}, {"facts", fact_lines}, {"claims", claim_lines}});

  std::vector<std::optional<ClaimJudgment>> slots(claims.size());
  try {
    for (const auto& j : doc.at("judgments")) {
      const auto idx = j.at("claim_index").get<long long>();
      if (idx < 0 || static_cast<std::size_t>(idx) >= claims.size())
        throw Error(ErrorKind::SchemaViolation, "claim_index out of range");
      auto& slot = slots[static_cast<std::size_t>(idx)];
      if (slot) throw Error(ErrorKind::SchemaViolation, "claim judged twice");
      ClaimJudgment judgment{claims[static_cast<std::size_t>(idx)],
                             parse_verdict(j.at("verdict").get<std::string>()), std::nullopt};
      const bool has_fact = j.contains("fact_index") && !j.at("fact_index").is_null();
      if (judgment.verdict == Verdict::Matched) {
        if (!has_fact) throw Error(ErrorKind::SchemaViolation, "matched claim without fact_index");
        const auto f = j.at("fact_index").get<long long>();
        if (f < 0 || static_cast<std::size_t>(f) >= facts.size())
          throw Error(ErrorKind::SchemaViolation, "fact_index out of range");
        judgment.matched_fact_index = static_cast<std::size_t>(f);
      }
      slot = std::move(judgment);
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::SchemaViolation, std::string("judgments: ") + e.what());
  }
  std::vector<ClaimJudgment> out;
  for (auto& s : slots) {
    if (!s) throw Error(ErrorKind::SchemaViolation, "a claim received no verdict");
    out.push_back(std::move(*s));
  }
  return out;
}

AlfaLabel compute_alfa(const std::vector<ClaimJudgment>& judgments) {
  if (judgments.empty()) throw Error(ErrorKind::EmptyJudgments, "no judgments");
  AlfaLabel label;
  for (const auto& j : judgments) {
    switch (j.verdict) {
      case Verdict::Matched: ++label.m; break;
      case Verdict::Hallucinated: ++label.h; break;
      case Verdict::Extraneous: ++label.e; break;
    }
  }
  label.n2 = static_cast<int>(judgments.size());
  const double n2 = label.n2;
  label.alpha_m = label.m / n2;
  label.alpha_h = label.h / n2;
  label.alpha_e = label.e / n2;
  return label;
}

GenSample generate_response(const ImageTensor& image, const std::string& prompt, VlmBackend& vlm, double temperature,
                            int max_tokens, int top_logprobs) {
  GenerationRequest req;
  req.image_png = encode_png(image);
  req.prompt = prompt;
  req.temperature = temperature;
  req.max_tokens = max_tokens;
  req.top_logprobs = top_logprobs;
  req.tags = {"response", 0};
  return GenSample::from_result(generate(vlm, req), 0);
}

AlfaOutcome label_response(const DatasetRecord& record, const GenSample& response, LlmBackend& llm,
                           const TemplateRegistry& templates) {
  if (blank(response.text)) throw Error(ErrorKind::EmptyResponse, "response is empty");
  AlfaOutcome out;
  out.response = response;
  for (auto& c : decompose_report(response.text, llm, templates)) out.claims.push_back(std::move(c.text));
  if (out.claims.empty()) throw Error(ErrorKind::EmptyResponse, "response makes no assertion");
  out.facts = decompose_reference(record.reference, record.question, llm, templates);
  out.judgments = match_claims(out.claims, out.facts, record.question, llm, templates);
  out.label = compute_alfa(out.judgments);
  return out;
}

AlfaOutcome label_sample(const DatasetRecord& record, const ImageTensor& image, VlmBackend& vlm, LlmBackend& llm,
                         const TemplateRegistry& templates, double temperature) {
  return label_response(record, generate_response(image, record.question, vlm, temperature), llm, templates);
}

AlfaOutcome label_sample(const DatasetRecord& record, VlmBackend& vlm, LlmBackend& llm,
                         const TemplateRegistry& templates, double temperature) {
  return label_sample(record, load_image(record.image_path), vlm, llm, templates, temperature);
}

}  // namespace univrse
