// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "univrse/backends.hpp"
#include "univrse/image.hpp"
#include "univrse/perturb.hpp"

namespace univrse {

/// One sampled response. seq_logprob is the sum of the chosen-token logprobs.
struct GenSample {
  std::string text;
  std::vector<double> token_logprobs;
  std::vector<std::vector<double>> top_logprobs;  // per token, descending
  double seq_logprob = 0.0;
  std::uint64_t transform_seed = 0;

  static GenSample from_result(const GenerationResult& result, std::uint64_t transform_seed);
};

struct SemanticClass {
  int id = 0;
  std::string representative;  // text of the first member
  std::vector<std::size_t> member_indices;
  double mass = 0.0;
};

struct SemanticDistribution {
  std::vector<SemanticClass> classes;
  std::vector<double> probs;

  std::size_t size() const { return classes.size(); }
};

/// exp(seq_logprob), or the per-token geometric mean when length_normalize.
double sequence_prob(const GenSample& sample, bool length_normalize = false);

/// Sequential clustering: each sample joins the first class whose
/// representative it mutually entails, otherwise founds a new class.
std::vector<SemanticClass> cluster_responses(std::span<const GenSample> samples, NliBackend& nli,
                                             std::string_view context);

/// Class masses are sums of member sequence probabilities. Normalized to a
/// distribution unless raw_masses. `degenerate` is set when every mass
/// underflows to zero; the distribution then falls back to uniform.
SemanticDistribution aggregate_classes(std::vector<SemanticClass> classes, std::span<const GenSample> samples,
                                       bool length_normalize, bool raw_masses, bool* degenerate = nullptr);

struct SpdConfig {
  int samples = 10;  // M
  double temperature = 1.0;
  int max_tokens = 256;
  int top_logprobs = 20;
  bool length_normalize = false;
  bool raw_masses = false;
  bool question_as_context = true;
  std::size_t workers = 4;
};

struct SpdEstimate {
  std::vector<GenSample> samples;
  SemanticDistribution distribution;
  bool degenerate = false;
  bool transformed = false;
};

/// Draws M samples of the VLM answer to `question` (each on an independently
/// seeded weak transform of the image when `weak` is enabled), clusters them
/// and aggregates the class masses.
SpdEstimate estimate_spd(const ImageTensor& image, const std::string& question, const SpdConfig& cfg,
                         const WeakTransformConfig& weak, VlmBackend& vlm, NliBackend& nli, std::uint64_t seed,
                         const std::string& branch);

}  // namespace univrse
