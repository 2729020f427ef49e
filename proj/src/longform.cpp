// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/longform.hpp"

#include <algorithm>
#include <cctype>

#include "univrse/alfa.hpp"
#include "univrse/digest.hpp"
#include "univrse/error.hpp"
#include "univrse/parallel.hpp"

namespace univrse {
namespace {

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

std::vector<AtomicClaim> decompose_report(const std::string& report, LlmBackend& llm,
                                          const TemplateRegistry& templates) {
  if (blank(report)) throw Error(ErrorKind::EmptyReport, "report has no content");
  const auto doc = llm_structured(llm, templates, templates::kDecomposeClaims, {{"text", report}});
  std::vector<AtomicClaim> claims;
  for (const auto& c : doc.at("claims")) {
    auto text = c.get<std::string>();
    if (blank(text)) continue;
    AtomicClaim claim;
    claim.index = static_cast<int>(claims.size());
    if (const auto at = report.find(text); at != std::string::npos) claim.source_span = {{at, at + text.size()}};
    claim.text = std::move(text);
    claims.push_back(std::move(claim));
  }
  return claims;
}

std::string generate_verification_question(const AtomicClaim& claim, LlmBackend& llm,
                                           const TemplateRegistry& templates) {
  const auto doc = llm_structured(llm, templates, templates::kVerificationQuestion, {{"claim", claim.text}});
  auto question = doc.at("question").get<std::string>();
  if (blank(question)) throw Error(ErrorKind::SchemaViolation, "verification question is empty");
  return question;
}

std::vector<ClaimVerificationItem> score_claims(const ImageTensor& image, const std::vector<AtomicClaim>& claims,
                                                const LongformConfig& cfg, VlmBackend& vlm, NliBackend& nli,
                                                LlmBackend& llm, const TemplateRegistry& templates,
                                                std::uint64_t seed) {
  return parallel_map(claims.size(), cfg.claim_workers, [&](std::size_t j) {
    ClaimVerificationItem item;
    item.claim = claims[j];
    try {
      item.question = generate_verification_question(item.claim, llm, templates);
      item.result = compute_vse(image, item.question, cfg.vse, vlm, nli, derive_seed(seed, "claim/" + item.claim.text));
    } catch (const Error& e) {
      item.error = e.what();
    }
    return item;
  });
}

ReportScore score_report(const ImageTensor& image, const std::string& instruction, const LongformConfig& cfg,
                         VlmBackend& vlm, NliBackend& nli, LlmBackend& llm, const TemplateRegistry& templates,
                         std::uint64_t seed) {
  ReportScore out;
  out.report = generate_response(image, instruction, vlm, cfg.report_temperature, 512, cfg.vse.spd.top_logprobs);
  if (blank(out.report.text)) throw Error(ErrorKind::EmptyReport, "VLM returned an empty report");
  const auto claims = decompose_report(out.report.text, llm, templates);
  if (claims.empty()) throw Error(ErrorKind::EmptyReport, "report contains no assertions");
  out.items = score_claims(image, claims, cfg, vlm, nli, llm, templates, seed);
  return out;
}

}  // namespace univrse
