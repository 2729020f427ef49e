// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <string>

#include "univrse/baselines.hpp"

namespace univrse {

struct ScoredSample {
  std::string id;
  double confidence = 0.0;  // higher = more confident
  double alpha_h = 0.0;
  bool binary_halluc = false;
};

/// Negates scores where higher means more hallucinated.
double normalize_confidence(const UncertaintyScore& score);

inline bool binarize_label(double alpha_h, double threshold = 0.0) { return alpha_h > threshold; }

/// Probability that a correct sample is more confident than a hallucinated
/// one, ties counting one half. Throws SingleClass.
double auc(std::span<const ScoredSample> samples);

/// Mean over X = 1..100 of the mean alpha_h among the ceil(X n / 100) most
/// confident samples (ties broken by id). Throws Empty.
double aua(std::span<const ScoredSample> samples);

}  // namespace univrse
