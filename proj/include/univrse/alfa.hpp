// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "univrse/dataset.hpp"
#include "univrse/image.hpp"
#include "univrse/semantic.hpp"
#include "univrse/templates.hpp"

namespace univrse {

enum class FactKind { InstructionAnswering, Contextual };
enum class Verdict { Matched, Hallucinated, Extraneous };

std::string_view to_string(FactKind kind);
std::string_view to_string(Verdict verdict);
FactKind parse_fact_kind(std::string_view name);
Verdict parse_verdict(std::string_view name);

struct AtomicFact {
  std::string text;
  FactKind kind = FactKind::InstructionAnswering;
};

struct ClaimJudgment {
  std::string claim;
  Verdict verdict = Verdict::Extraneous;
  std::optional<std::size_t> matched_fact_index;  // present iff matched
};

/// Matched / hallucinated / extraneous counts over n2 claims and their ratios.
struct AlfaLabel {
  int n2 = 0;
  int m = 0;
  int h = 0;
  int e = 0;
  double alpha_m = 0.0;
  double alpha_h = 0.0;
  double alpha_e = 0.0;
};

std::vector<AtomicFact> decompose_reference(const std::string& reference, const std::string& instruction,
                                            LlmBackend& llm, const TemplateRegistry& templates);

std::vector<ClaimJudgment> match_claims(const std::vector<std::string>& claims, const std::vector<AtomicFact>& facts,
                                        const std::string& instruction, LlmBackend& llm,
                                        const TemplateRegistry& templates);

AlfaLabel compute_alfa(const std::vector<ClaimJudgment>& judgments);

struct AlfaOutcome {
  GenSample response;
  std::vector<std::string> claims;
  std::vector<AtomicFact> facts;
  std::vector<ClaimJudgment> judgments;
  AlfaLabel label;
};

/// Labels an already generated response against the record's reference.
AlfaOutcome label_response(const DatasetRecord& record, const GenSample& response, LlmBackend& llm,
                           const TemplateRegistry& templates);

/// Generates one low-temperature response and labels it.
AlfaOutcome label_sample(const DatasetRecord& record, const ImageTensor& image, VlmBackend& vlm, LlmBackend& llm,
                         const TemplateRegistry& templates, double temperature = 0.1);
AlfaOutcome label_sample(const DatasetRecord& record, VlmBackend& vlm, LlmBackend& llm,
                         const TemplateRegistry& templates, double temperature = 0.1);

/// The deployment response being audited: one call tagged "response".
GenSample generate_response(const ImageTensor& image, const std::string& prompt, VlmBackend& vlm, double temperature,
                            int max_tokens = 512, int top_logprobs = 20);

}  // namespace univrse
