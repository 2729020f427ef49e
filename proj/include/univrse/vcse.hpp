// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "univrse/semantic.hpp"

namespace univrse {

struct AlignedClasses {
  std::vector<std::string> representatives;
  std::vector<double> p_a;
  std::vector<double> p_b;
};

/// Unifies two class sets, anchored on `a`: every class of `b` merges into the
/// first class of `a` with an equivalent representative, otherwise it is
/// appended. Missing classes carry probability 0.
AlignedClasses align_class_sets(const SemanticDistribution& a, const SemanticDistribution& b, NliBackend& nli,
                                std::string_view context);

std::vector<double> softmax(std::span<const double> logits);

/// softmax((1 + lambda) * p - lambda * p_prime).
std::vector<double> contrast_distributions(std::span<const double> p, std::span<const double> p_prime, double lambda);

/// Same contrast without the probability-vector preconditions (raw masses).
std::vector<double> contrast_logits(std::span<const double> p, std::span<const double> p_prime, double lambda);

/// Entropy in nats with 0 ln 0 = 0.
double shannon_entropy(std::span<const double> dist);

struct VisionConditionedDistribution {
  std::vector<std::string> unified_classes;
  std::vector<double> p_orig;
  std::vector<double> p_dist;
  std::vector<double> p_contrasted;
  double lambda = 1.0;
};

struct VseScore {
  double value = 0.0;  // nats
  int n_classes = 0;
  bool flagged_degenerate = false;
};

enum class TransformPlacement { Both, DistortedOnly };

std::string_view to_string(TransformPlacement placement);
TransformPlacement parse_placement(std::string_view name);

struct VseConfig {
  SpdConfig spd;
  WeakTransformConfig weak;
  DistortionConfig distortion;
  TransformPlacement placement = TransformPlacement::Both;
  double lambda = 1.0;
};

struct VseResult {
  VseScore score;
  VisionConditionedDistribution vsd;
  SpdEstimate original;
  SpdEstimate distorted;
  std::uint64_t seed = 0;
};

/// Original-branch SPD, distorted-branch SPD, alignment, contrast, entropy.
VseResult compute_vse(const ImageTensor& image, const std::string& question, const VseConfig& cfg, VlmBackend& vlm,
                      NliBackend& nli, std::uint64_t seed);

/// Recomputes the entropy of the contrast from stored intermediates.
double recompute_vse(const VisionConditionedDistribution& vsd, bool raw_masses = false);

struct ThresholdCalibration {
  double tau = 0.0;
  double youden_j = 0.0;
  bool degenerate = false;  // all scores equal; tau is that value
};

/// Threshold maximizing Youden's J over midpoints of consecutive distinct
/// scores, for the rule "hallucinated iff score > tau". Ties go to the
/// smaller tau.
ThresholdCalibration calibrate_threshold(std::span<const double> scores, const std::vector<bool>& labels);

inline bool flag_hallucination(double vse, double tau) { return vse > tau; }

}  // namespace univrse
