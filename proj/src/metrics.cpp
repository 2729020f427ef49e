// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/metrics.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "univrse/error.hpp"

namespace univrse {

double normalize_confidence(const UncertaintyScore& score) {
  return score.orientation == Orientation::HigherMeansHallucinated ? -score.value : score.value;
}

double auc(std::span<const ScoredSample> samples) {
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return samples[a].confidence < samples[b].confidence; });

  // Mann-Whitney with mid-ranks; ranks are doubled to stay integral.
  std::int64_t n_correct = 0, n_halluc = 0, rank2_sum_correct = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && samples[order[j]].confidence == samples[order[i]].confidence) ++j;
    const auto mid_rank2 = static_cast<std::int64_t>(i + 1 + j);  // 2 * mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (samples[order[k]].binary_halluc) {
        ++n_halluc;
      } else {
        ++n_correct;
        rank2_sum_correct += mid_rank2;
      }
    }
    i = j;
  }
  if (n_correct == 0 || n_halluc == 0)
    throw Error(ErrorKind::SingleClass, "AUC needs correct and hallucinated samples");
  // 2 * (pairs won + ties / 2)
  const std::int64_t twice_u = rank2_sum_correct - n_correct * (n_correct + 1);
  return static_cast<double>(twice_u) / (2.0 * static_cast<double>(n_correct) * static_cast<double>(n_halluc));
}

double aua(std::span<const ScoredSample> samples) {
  if (samples.empty()) throw Error(ErrorKind::Empty, "AUA needs at least one sample");
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (samples[a].confidence != samples[b].confidence) return samples[a].confidence > samples[b].confidence;
    return samples[a].id < samples[b].id;
  });
  std::vector<double> prefix(order.size() + 1, 0.0);
  for (std::size_t i = 0; i < order.size(); ++i) prefix[i + 1] = prefix[i] + samples[order[i]].alpha_h;

  const std::size_t n = samples.size();
  double total = 0.0;
  for (std::size_t x = 1; x <= 100; ++x) {
    const std::size_t k = (x * n + 99) / 100;
    total += prefix[k] / static_cast<double>(k);
  }
  return total / 100.0;
}

}  // namespace univrse
