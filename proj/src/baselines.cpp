// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "univrse/error.hpp"
#include "univrse/vcse.hpp"

namespace univrse {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::AvgProb: return "AvgProb";
    case Method::MaxProb: return "MaxProb";
    case Method::AvgEnt: return "AvgEnt";
    case Method::MaxEnt: return "MaxEnt";
    case Method::SE: return "SE";
    case Method::RadFlag: return "RadFlag";
    case Method::CrossCheck: return "CrossCheck";
    case Method::UniVRSE: return "UniVRSE";
  }
  return "UniVRSE";
}

Method parse_method(std::string_view name) {
  for (Method m : kAllMethods)
    if (to_string(m) == name) return m;
  throw Error(ErrorKind::ConfigError, "unknown method '" + std::string(name) + "'");
}

Orientation orientation_of(Method method) {
  return (method == Method::AvgProb || method == Method::MaxProb) ? Orientation::LowerMeansHallucinated
                                                                   : Orientation::HigherMeansHallucinated;
}

double avg_prob(const GenSample& sample) {
  if (sample.token_logprobs.empty()) throw Error(ErrorKind::EmptySequence, "sample has no tokens");
  double sum = 0.0;
  for (double lp : sample.token_logprobs) sum += std::exp(lp);
  return sum / static_cast<double>(sample.token_logprobs.size());
}

double max_prob(const GenSample& sample) {
  if (sample.token_logprobs.empty()) throw Error(ErrorKind::EmptySequence, "sample has no tokens");
  return std::exp(*std::max_element(sample.token_logprobs.begin(), sample.token_logprobs.end()));
}

double token_entropy(std::span<const double> top_logprobs) {
  if (top_logprobs.empty()) throw Error(ErrorKind::MissingTopK, "token has no top-k alternatives");
  std::vector<double> probs;
  probs.reserve(top_logprobs.size());
  for (double lp : top_logprobs) probs.push_back(std::exp(lp));
  // Fixed summation order makes the result independent of the input order.
  std::sort(probs.begin(), probs.end(), std::greater<>());
  double mass = 0.0, h = 0.0;
  for (double p : probs) {
    mass += p;
    if (p > 0.0) h -= p * std::log(p);
  }
  const double residual = 1.0 - mass;
  if (residual > 0.0) h -= residual * std::log(residual);
  return std::max(h, 0.0);
}

namespace {

std::vector<double> token_entropies(const GenSample& sample) {
  if (sample.top_logprobs.empty()) throw Error(ErrorKind::MissingTopK, "sample has no top-k data");
  std::vector<double> out;
  out.reserve(sample.top_logprobs.size());
  for (const auto& top : sample.top_logprobs) out.push_back(token_entropy(top));
  return out;
}

}  // namespace

double avg_ent(const GenSample& sample) {
  const auto h = token_entropies(sample);
  double sum = 0.0;
  for (double v : h) sum += v;
  return sum / static_cast<double>(h.size());
}

double max_ent(const GenSample& sample) {
  const auto h = token_entropies(sample);
  return *std::max_element(h.begin(), h.end());
}

double semantic_entropy(const SemanticDistribution& spd) { return shannon_entropy(spd.probs); }

double semantic_entropy(const ImageTensor& image, const std::string& question, const SpdConfig& cfg,
                        const WeakTransformConfig& weak, VlmBackend& vlm, NliBackend& nli, std::uint64_t seed) {
  return semantic_entropy(estimate_spd(image, question, cfg, weak, vlm, nli, seed, "original").distribution);
}

double radflag_score(std::string_view original, std::span<const GenSample> samples, NliBackend& nli,
                     std::string_view context) {
  if (samples.empty()) throw Error(ErrorKind::InvalidConfig, "RadFlag needs at least one sample");
  std::size_t agree = 0;
  for (const auto& s : samples)
    if (semantically_equivalent(nli, original, s.text, context)) ++agree;
  return 1.0 - static_cast<double>(agree) / static_cast<double>(samples.size());
}

double cross_check_score(std::string_view original, std::span<const std::string> others, NliBackend& nli,
                         std::string_view context) {
  if (others.empty()) throw Error(ErrorKind::NoAuxiliaryBackend, "cross-checking needs an auxiliary model");
  std::size_t agree = 0;
  for (const auto& o : others)
    if (semantically_equivalent(nli, original, o, context)) ++agree;
  return 1.0 - static_cast<double>(agree) / static_cast<double>(others.size());
}

std::vector<std::string> auxiliary_answers(const ImageTensor& image, const std::string& question,
                                           std::span<const std::shared_ptr<VlmBackend>> aux, double temperature) {
  if (aux.empty()) throw Error(ErrorKind::NoAuxiliaryBackend, "no auxiliary backend configured");
  const auto png = encode_png(image);
  std::vector<std::string> out;
  for (std::size_t i = 0; i < aux.size(); ++i) {
    GenerationRequest req;
    req.image_png = png;
    req.prompt = question;
    req.temperature = temperature;
    req.tags = {"auxiliary", i};
    out.push_back(generate(*aux[i], req).text);
  }
  return out;
}

}  // namespace univrse
