// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "univrse/semantic.hpp"

namespace univrse {

enum class Method { AvgProb, MaxProb, AvgEnt, MaxEnt, SE, RadFlag, CrossCheck, UniVRSE };

inline constexpr Method kAllMethods[] = {Method::AvgProb, Method::MaxProb, Method::AvgEnt,     Method::MaxEnt,
                                         Method::SE,      Method::RadFlag, Method::CrossCheck, Method::UniVRSE};

enum class Orientation { HigherMeansHallucinated, LowerMeansHallucinated };

std::string_view to_string(Method method);
Method parse_method(std::string_view name);
Orientation orientation_of(Method method);

struct UncertaintyScore {
  Method method = Method::UniVRSE;
  double value = 0.0;
  Orientation orientation = Orientation::HigherMeansHallucinated;

  static UncertaintyScore of(Method method, double value) { return {method, value, orientation_of(method)}; }
};

double avg_prob(const GenSample& sample);
double max_prob(const GenSample& sample);

/// Entropy of one token's top-k probabilities plus a residual outcome holding
/// 1 - sum(top-k).
double token_entropy(std::span<const double> top_logprobs);
double avg_ent(const GenSample& sample);
double max_ent(const GenSample& sample);

double semantic_entropy(const SemanticDistribution& spd);
double semantic_entropy(const ImageTensor& image, const std::string& question, const SpdConfig& cfg,
                        const WeakTransformConfig& weak, VlmBackend& vlm, NliBackend& nli, std::uint64_t seed);

/// 1 - fraction of samples equivalent to the original answer.
double radflag_score(std::string_view original, std::span<const GenSample> samples, NliBackend& nli,
                     std::string_view context);

/// 1 - mean agreement between the original answer and auxiliary-model answers.
double cross_check_score(std::string_view original, std::span<const std::string> others, NliBackend& nli,
                         std::string_view context);

/// One low-temperature answer from each auxiliary VLM, tagged "auxiliary".
std::vector<std::string> auxiliary_answers(const ImageTensor& image, const std::string& question,
                                           std::span<const std::shared_ptr<VlmBackend>> aux, double temperature);

}  // namespace univrse
