// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/semantic.hpp"

#include <cmath>
#include <numeric>

#include "univrse/digest.hpp"
#include "univrse/error.hpp"
#include "univrse/parallel.hpp"

namespace univrse {

GenSample GenSample::from_result(const GenerationResult& result, std::uint64_t transform_seed) {
  GenSample s;
  s.text = result.text;
  s.transform_seed = transform_seed;
  for (const auto& t : result.tokens) {
    s.token_logprobs.push_back(t.logprob);
    s.top_logprobs.push_back(t.top_logprobs);
  }
  s.seq_logprob = std::accumulate(s.token_logprobs.begin(), s.token_logprobs.end(), 0.0);
  return s;
}

double sequence_prob(const GenSample& sample, bool length_normalize) {
  if (sample.token_logprobs.empty()) throw Error(ErrorKind::EmptySequence, "sample has no tokens");
  if (!length_normalize) return std::exp(sample.seq_logprob);
  return std::exp(sample.seq_logprob / static_cast<double>(sample.token_logprobs.size()));
}

std::vector<SemanticClass> cluster_responses(std::span<const GenSample> samples, NliBackend& nli,
                                             std::string_view context) {
  if (samples.empty()) throw Error(ErrorKind::InvalidConfig, "cannot cluster an empty sample set");
  std::vector<SemanticClass> classes;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    bool placed = false;
    for (auto& c : classes) {
      if (semantically_equivalent(nli, c.representative, samples[i].text, context)) {
        c.member_indices.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) {
      SemanticClass c;
      c.id = static_cast<int>(classes.size());
      c.representative = samples[i].text;
      c.member_indices.push_back(i);
      classes.push_back(std::move(c));
    }
  }
  return classes;
}

SemanticDistribution aggregate_classes(std::vector<SemanticClass> classes, std::span<const GenSample> samples,
                                       bool length_normalize, bool raw_masses, bool* degenerate) {
  SemanticDistribution out;
  double total = 0.0;
  for (auto& c : classes) {
    c.mass = 0.0;
    for (std::size_t idx : c.member_indices) {
      // An empty response has no tokens and contributes no mass.
      if (!samples[idx].token_logprobs.empty()) c.mass += sequence_prob(samples[idx], length_normalize);
    }
    total += c.mass;
  }
  const bool collapsed = !(total > 0.0) || !std::isfinite(total);
  if (degenerate) *degenerate = collapsed;
  out.probs.reserve(classes.size());
  for (const auto& c : classes) {
    if (collapsed)
      out.probs.push_back(1.0 / static_cast<double>(classes.size()));
    else
      out.probs.push_back(raw_masses ? c.mass : c.mass / total);
  }
  out.classes = std::move(classes);
  return out;
}

SpdEstimate estimate_spd(const ImageTensor& image, const std::string& question, const SpdConfig& cfg,
                         const WeakTransformConfig& weak, VlmBackend& vlm, NliBackend& nli, std::uint64_t seed,
                         const std::string& branch) {
  if (cfg.samples < 2) throw Error(ErrorKind::InvalidConfig, "M must be at least 2");
  SpdEstimate est;
  est.transformed = weak.enabled;
  const auto n = static_cast<std::size_t>(cfg.samples);
  est.samples = parallel_map(n, cfg.workers, [&](std::size_t i) {
    const std::uint64_t sample_seed = derive_seed(seed, i);
    const ImageTensor view = weak.enabled ? apply_weak_transform(image, weak, sample_seed) : image;
    GenerationRequest req;
    req.image_png = encode_png(view);
    req.prompt = question;
    req.temperature = cfg.temperature;
    req.max_tokens = cfg.max_tokens;
    req.top_logprobs = cfg.top_logprobs;
    req.seed = sample_seed;
    req.tags = {branch, i};
    return GenSample::from_result(generate(vlm, req), sample_seed);
  });
  const std::string_view context = cfg.question_as_context ? std::string_view(question) : std::string_view();
  auto classes = cluster_responses(est.samples, nli, context);
  est.distribution =
      aggregate_classes(std::move(classes), est.samples, cfg.length_normalize, cfg.raw_masses, &est.degenerate);
  return est;
}

}  // namespace univrse
