// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "univrse/templates.hpp"
#include "univrse/vcse.hpp"

namespace univrse {

struct AtomicClaim {
  int index = 0;
  std::string text;
  std::optional<std::pair<std::size_t, std::size_t>> source_span;  // [begin, end) in the report
};

struct ClaimVerificationItem {
  AtomicClaim claim;
  std::string question;
  std::optional<VseResult> result;
  std::string error;  // set when this claim could not be scored
};

std::vector<AtomicClaim> decompose_report(const std::string& report, LlmBackend& llm,
                                          const TemplateRegistry& templates);

std::string generate_verification_question(const AtomicClaim& claim, LlmBackend& llm,
                                           const TemplateRegistry& templates);

struct LongformConfig {
  VseConfig vse;
  double report_temperature = 0.1;
  std::size_t claim_workers = 2;
};

/// Turns each claim into a verification question and scores it with VSE.
/// Claim seeds derive from the claim text, so scores do not depend on order.
/// A failing claim keeps its error in the item; the others still run.
std::vector<ClaimVerificationItem> score_claims(const ImageTensor& image, const std::vector<AtomicClaim>& claims,
                                                const LongformConfig& cfg, VlmBackend& vlm, NliBackend& nli,
                                                LlmBackend& llm, const TemplateRegistry& templates,
                                                std::uint64_t seed);

struct ReportScore {
  GenSample report;
  std::vector<ClaimVerificationItem> items;
};

/// Generates the report at low temperature, decomposes it into claims and
/// scores every claim.
ReportScore score_report(const ImageTensor& image, const std::string& instruction, const LongformConfig& cfg,
                         VlmBackend& vlm, NliBackend& nli, LlmBackend& llm, const TemplateRegistry& templates,
                         std::uint64_t seed);

}  // namespace univrse
