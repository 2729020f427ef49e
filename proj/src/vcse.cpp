// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/vcse.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <numeric>
#include <string>

#include "univrse/digest.hpp"
#include "univrse/error.hpp"

namespace univrse {
namespace {

void require_distribution(std::span<const double> dist, double tol, const char* what) {
  if (dist.empty()) throw Error(ErrorKind::NotADistribution, std::string(what) + " is empty");
  double sum = 0.0;
  for (double p : dist) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw Error(ErrorKind::NotADistribution, std::string(what) + " has a negative or non-finite entry");
    sum += p;
  }
  if (std::abs(sum - 1.0) > tol)
    throw Error(ErrorKind::NotADistribution, std::string(what) + " sums to " + std::to_string(sum));
}

}  // namespace

AlignedClasses align_class_sets(const SemanticDistribution& a, const SemanticDistribution& b, NliBackend& nli,
                                std::string_view context) {
  AlignedClasses out;
  const std::size_t n_a = a.classes.size();
  for (std::size_t i = 0; i < n_a; ++i) out.representatives.push_back(a.classes[i].representative);
  out.p_a = a.probs;
  out.p_b.assign(n_a, 0.0);
  for (std::size_t j = 0; j < b.classes.size(); ++j) {
    const auto& rep = b.classes[j].representative;
    std::size_t target = n_a;
    for (std::size_t i = 0; i < n_a; ++i) {
      if (semantically_equivalent(nli, out.representatives[i], rep, context)) {
        target = i;
        break;
      }
    }
    if (target == n_a) {
      out.representatives.push_back(rep);
      out.p_a.push_back(0.0);
      out.p_b.push_back(b.probs[j]);
    } else {
      out.p_b[target] += b.probs[j];
    }
  }
  return out;
}

std::vector<double> softmax(std::span<const double> logits) {
  std::vector<double> out(logits.begin(), logits.end());
  if (out.empty()) return out;
  const double peak = *std::max_element(out.begin(), out.end());
  double sum = 0.0;
  for (double& v : out) {
    v = std::exp(v - peak);
    sum += v;
  }
  for (double& v : out) v /= sum;
  return out;
}

std::vector<double> contrast_logits(std::span<const double> p, std::span<const double> p_prime, double lambda) {
  if (p.size() != p_prime.size() || p.empty())
    throw Error(ErrorKind::LengthMismatch, "contrast needs two equal-length non-empty vectors");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidLambda, "lambda must be >= 0");
  std::vector<double> logits(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) logits[i] = (1.0 + lambda) * p[i] - lambda * p_prime[i];
  return softmax(logits);
}

std::vector<double> contrast_distributions(std::span<const double> p, std::span<const double> p_prime, double lambda) {
  if (p.size() != p_prime.size() || p.empty())
    throw Error(ErrorKind::LengthMismatch, "contrast needs two equal-length non-empty vectors");
  require_distribution(p, 1e-5, "p");
  require_distribution(p_prime, 1e-5, "p'");
  return contrast_logits(p, p_prime, lambda);
}

double shannon_entropy(std::span<const double> dist) {
  require_distribution(dist, 1e-5, "distribution");
  double h = 0.0;
  for (double p : dist)
    if (p > 0.0) h -= p * std::log(p);
  return std::max(h, 0.0);
}

std::string_view to_string(TransformPlacement placement) {
  return placement == TransformPlacement::Both ? "both" : "distorted_only";
}

TransformPlacement parse_placement(std::string_view name) {
  if (name == "both") return TransformPlacement::Both;
  if (name == "distorted_only") return TransformPlacement::DistortedOnly;
  throw Error(ErrorKind::InvalidConfig, "placement must be 'both' or 'distorted_only'");
}

VseResult compute_vse(const ImageTensor& image, const std::string& question, const VseConfig& cfg, VlmBackend& vlm,
                      NliBackend& nli, std::uint64_t seed) {
  validate(cfg.weak);
  validate(cfg.distortion);
  if (!(cfg.lambda >= 0.0)) throw Error(ErrorKind::InvalidLambda, "lambda must be >= 0");

  VseResult out;
  out.seed = seed;
  WeakTransformConfig original_weak = cfg.weak;
  if (cfg.placement == TransformPlacement::DistortedOnly) original_weak.enabled = false;

  auto distorted_future = std::async(std::launch::async, [&] {
    const ImageTensor distorted = apply_distortion(image, cfg.distortion, derive_seed(seed, "distortion"));
    return estimate_spd(distorted, question, cfg.spd, cfg.weak, vlm, nli, derive_seed(seed, "distorted"),
                        "distorted");
  });
  out.original =
      estimate_spd(image, question, cfg.spd, original_weak, vlm, nli, derive_seed(seed, "original"), "original");
  out.distorted = distorted_future.get();

  const std::string_view context = cfg.spd.question_as_context ? std::string_view(question) : std::string_view();
  auto aligned = align_class_sets(out.original.distribution, out.distorted.distribution, nli, context);

  auto& vsd = out.vsd;
  vsd.unified_classes = std::move(aligned.representatives);
  vsd.p_orig = std::move(aligned.p_a);
  vsd.p_dist = std::move(aligned.p_b);
  vsd.lambda = cfg.lambda;
  vsd.p_contrasted = cfg.spd.raw_masses ? contrast_logits(vsd.p_orig, vsd.p_dist, cfg.lambda)
                                        : contrast_distributions(vsd.p_orig, vsd.p_dist, cfg.lambda);
  out.score.value = shannon_entropy(vsd.p_contrasted);
  out.score.n_classes = static_cast<int>(vsd.unified_classes.size());
  out.score.flagged_degenerate = out.original.degenerate || out.distorted.degenerate;
  return out;
}

double recompute_vse(const VisionConditionedDistribution& vsd, bool raw_masses) {
  const auto q = raw_masses ? contrast_logits(vsd.p_orig, vsd.p_dist, vsd.lambda)
                            : contrast_distributions(vsd.p_orig, vsd.p_dist, vsd.lambda);
  return shannon_entropy(q);
}

ThresholdCalibration calibrate_threshold(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw Error(ErrorKind::LengthMismatch, "scores and labels differ in length");
  const auto positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0)
    throw Error(ErrorKind::SingleClassLabels, "calibration needs both labels present");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  ThresholdCalibration best;
  bool found = false;
  // J = (tp * neg - fp * pos) / (pos * neg); numerators compare exactly.
  std::int64_t best_num = 0;
  // Sweep upward: at a midpoint after index k, everything up to k is below tau.
  std::size_t pos_below = 0, neg_below = 0;
  for (std::size_t k = 0; k + 1 < order.size(); ++k) {
    if (labels[order[k]])
      ++pos_below;
    else
      ++neg_below;
    const double lo = scores[order[k]];
    const double hi = scores[order[k + 1]];
    if (!(lo < hi)) continue;
    const double tau = lo + (hi - lo) / 2.0;
    const auto tp = static_cast<std::int64_t>(positives - pos_below);
    const auto fp = static_cast<std::int64_t>(negatives - neg_below);
    const std::int64_t num = tp * static_cast<std::int64_t>(negatives) - fp * static_cast<std::int64_t>(positives);
    if (!found || num > best_num) {
      best_num = num;
      best = {tau, static_cast<double>(num) / (static_cast<double>(positives) * static_cast<double>(negatives)), false};
      found = true;
    }
  }
  if (!found) {
    best.tau = scores[0];
    best.degenerate = true;
    best.youden_j = 0.0;
  }
  return best;
}

}  // namespace univrse
