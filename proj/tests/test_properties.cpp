// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

// Randomized invariants checked against brute-force oracles.

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include "support/fixtures.hpp"
#include "univrse/alfa.hpp"
#include "univrse/metrics.hpp"
#include "univrse/perturb.hpp"
#include "univrse/semantic.hpp"
#include "univrse/vcse.hpp"

using namespace univrse;
using namespace univrse::testing;

namespace {

constexpr int kTrials = 200;

std::vector<double> random_dist(std::mt19937_64& rng, std::size_t n, bool allow_zeros = true) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> p(n);
  for (auto& v : p) v = (allow_zeros && u(rng) < 0.2) ? 0.0 : u(rng) + 1e-3;
  if (std::accumulate(p.begin(), p.end(), 0.0) == 0.0) p[0] = 1.0;
  const double s = std::accumulate(p.begin(), p.end(), 0.0);
  for (auto& v : p) v /= s;
  return p;
}

// Answers "<key>:<variant>" are equivalent iff their keys agree.
std::string key_of(std::string_view s) { return std::string(s.substr(0, s.find(':'))); }

GenSample sample(const std::string& text, double lp) {
  GenSample s;
  s.text = text;
  s.token_logprobs = {lp};
  s.top_logprobs = {{lp}};
  s.seq_logprob = lp;
  return s;
}

std::vector<GenSample> random_samples(std::mt19937_64& rng, int n, int keys) {
  std::uniform_int_distribution<int> k(0, keys - 1), variant(0, 3);
  std::uniform_real_distribution<double> lp(-6.0, 0.0);
  std::vector<GenSample> out;
  for (int i = 0; i < n; ++i)
    out.push_back(sample("k" + std::to_string(k(rng)) + ":" + std::to_string(variant(rng)), lp(rng)));
  return out;
}

double brute_auc(const std::vector<ScoredSample>& s) {
  double wins = 0;
  int pairs = 0;
  for (const auto& c : s)
    for (const auto& h : s)
      if (!c.binary_halluc && h.binary_halluc) {
        ++pairs;
        wins += c.confidence > h.confidence ? 1.0 : c.confidence == h.confidence ? 0.5 : 0.0;
      }
  return wins / pairs;
}

std::vector<ScoredSample> random_scored(std::mt19937_64& rng, int n, int levels) {
  std::uniform_int_distribution<int> lvl(0, levels - 1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<ScoredSample> out;
  for (int i = 0; i < n; ++i) {
    ScoredSample s;
    s.id = "s" + std::to_string(1000 + i);
    s.confidence = lvl(rng) / static_cast<double>(levels);
    s.alpha_h = u(rng) < 0.5 ? 0.0 : std::round(u(rng) * 4) / 4;
    s.binary_halluc = binarize_label(s.alpha_h);
    out.push_back(s);
  }
  return out;
}

bool both_classes(const std::vector<ScoredSample>& s) {
  const auto h = std::count_if(s.begin(), s.end(), [](const auto& x) { return x.binary_halluc; });
  return h > 0 && h < static_cast<long>(s.size());
}

}  // namespace

TEST(Property, ContrastIsDistributionWithBoundedEntropy) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lam(0.0, 20.0);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + rng() % 12;
    const auto p = random_dist(rng, n), q = random_dist(rng, n);
    const auto v = contrast_distributions(p, q, lam(rng));
    EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-12);
    for (double x : v) EXPECT_GT(x, 0.0);
    const double h = shannon_entropy(v);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log(static_cast<double>(n)) + 1e-9);
  }
}

TEST(Property, ZeroLambdaIsSoftmaxOfOriginal) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 1 + rng() % 10;
    const auto p = random_dist(rng, n), q = random_dist(rng, n);
    const auto v = contrast_distributions(p, q, 0.0);
    const auto s = softmax(p);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(v[i], s[i], 1e-15);
  }
}

TEST(Property, EntropyInvariantUnderJointPermutation) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < kTrials; ++t) {
    const std::size_t n = 2 + rng() % 8;
    auto p = random_dist(rng, n), q = random_dist(rng, n);
    const double lambda = 0.1 * static_cast<double>(rng() % 40);
    const double h = shannon_entropy(contrast_distributions(p, q, lambda));
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> pp(n), qq(n);
    for (std::size_t i = 0; i < n; ++i) pp[i] = p[perm[i]], qq[i] = q[perm[i]];
    EXPECT_NEAR(shannon_entropy(contrast_distributions(pp, qq, lambda)), h, 1e-12);
  }
}

TEST(Property, ClusteringMatchesKeyPartition) {
  std::mt19937_64 rng(4);
  FnNli nli(nli_by_key(key_of));
  for (int t = 0; t < 100; ++t) {
    const auto samples = random_samples(rng, 2 + static_cast<int>(rng() % 12), 1 + static_cast<int>(rng() % 5));
    const auto classes = cluster_responses(samples, nli, "Q");
    // Oracle: classes in first-appearance order of their key.
    std::vector<std::string> order;
    std::map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto k = key_of(samples[i].text);
      if (!members.count(k)) order.push_back(k);
      members[k].push_back(i);
    }
    ASSERT_EQ(classes.size(), order.size());
    for (std::size_t c = 0; c < order.size(); ++c) {
      EXPECT_EQ(classes[c].member_indices, members[order[c]]);
      EXPECT_EQ(classes[c].representative, samples[members[order[c]].front()].text);
    }
    bool degenerate = true;
    const auto dist = aggregate_classes(classes, samples, false, false, &degenerate);
    EXPECT_FALSE(degenerate);
    double total = 0;
    for (const auto& s : samples) total += std::exp(s.seq_logprob);
    for (std::size_t c = 0; c < order.size(); ++c) {
      double mass = 0;
      for (auto i : members[order[c]]) mass += std::exp(samples[i].seq_logprob);
      EXPECT_NEAR(dist.probs[c], mass / total, 1e-12);
    }
  }
}

TEST(Property, AlignmentConservesMassAndAnchors) {
  std::mt19937_64 rng(5);
  FnNli nli(nli_by_key(key_of));
  for (int t = 0; t < 100; ++t) {
    const int keys = 1 + static_cast<int>(rng() % 6);
    const auto sa = random_samples(rng, 2 + static_cast<int>(rng() % 8), keys);
    const auto sb = random_samples(rng, 2 + static_cast<int>(rng() % 8), keys);
    const auto a = aggregate_classes(cluster_responses(sa, nli, "Q"), sa, false, false);
    const auto b = aggregate_classes(cluster_responses(sb, nli, "Q"), sb, false, false);
    const auto al = align_class_sets(a, b, nli, "Q");
    ASSERT_EQ(al.p_a.size(), al.representatives.size());
    ASSERT_EQ(al.p_b.size(), al.representatives.size());
    EXPECT_NEAR(std::accumulate(al.p_a.begin(), al.p_a.end(), 0.0), 1.0, 1e-12);
    EXPECT_NEAR(std::accumulate(al.p_b.begin(), al.p_b.end(), 0.0), 1.0, 1e-12);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_EQ(al.representatives[i], a.classes[i].representative);
      EXPECT_DOUBLE_EQ(al.p_a[i], a.probs[i]);
    }
    // Unified size is the number of distinct keys over both branches.
    std::set<std::string> all;
    for (const auto& s : sa) all.insert(key_of(s.text));
    for (const auto& s : sb) all.insert(key_of(s.text));
    EXPECT_EQ(al.representatives.size(), all.size());
  }
}

TEST(Property, AucMatchesPairwiseOracle) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < kTrials; ++t) {
    auto s = random_scored(rng, 2 + static_cast<int>(rng() % 30), 1 + static_cast<int>(rng() % 8));
    if (!both_classes(s)) continue;
    const double a = auc(s);
    EXPECT_NEAR(a, brute_auc(s), 1e-12);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
    auto mono = s;
    for (auto& x : mono) x.confidence = std::exp(3 * x.confidence) - 7;
    EXPECT_NEAR(auc(mono), a, 1e-12);
    auto rev = s;
    for (auto& x : rev) x.confidence = -x.confidence;
    EXPECT_NEAR(auc(rev), 1.0 - a, 1e-12);
  }
}

TEST(Property, AuaBoundsAndInvariance) {
  std::mt19937_64 rng(7);
  for (int t = 0; t < kTrials; ++t) {
    auto s = random_scored(rng, 1 + static_cast<int>(rng() % 40), 1 + static_cast<int>(rng() % 10));
    const double v = aua(s);
    double lo = 1, hi = 0, mean = 0;
    for (const auto& x : s) lo = std::min(lo, x.alpha_h), hi = std::max(hi, x.alpha_h), mean += x.alpha_h;
    mean /= static_cast<double>(s.size());
    EXPECT_GE(v, lo - 1e-12);
    EXPECT_LE(v, hi + 1e-12);
    auto mono = s;
    for (auto& x : mono) x.confidence = 2 * x.confidence + 1;
    EXPECT_NEAR(aua(mono), v, 1e-12);
    auto shuffled = s;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_NEAR(aua(shuffled), v, 1e-12);
    // Constant alpha gives that constant; the X = 100 term is the overall mean.
    auto flat = s;
    for (auto& x : flat) x.alpha_h = 0.25;
    EXPECT_NEAR(aua(flat), 0.25, 1e-12);
    (void)mean;
  }
}

TEST(Property, AlfaRatiosPartitionClaims) {
  std::mt19937_64 rng(8);
  for (int t = 0; t < kTrials; ++t) {
    std::vector<ClaimJudgment> js;
    const int n = 1 + static_cast<int>(rng() % 15);
    int m = 0, h = 0, e = 0;
    for (int i = 0; i < n; ++i) {
      ClaimJudgment j;
      j.claim = "c" + std::to_string(i);
      switch (rng() % 3) {
        case 0: j.verdict = Verdict::Matched, j.matched_fact_index = 0, ++m; break;
        case 1: j.verdict = Verdict::Hallucinated, ++h; break;
        default: j.verdict = Verdict::Extraneous, ++e;
      }
      js.push_back(j);
    }
    const auto l = compute_alfa(js);
    EXPECT_EQ(l.n2, n);
    EXPECT_EQ(l.m, m);
    EXPECT_EQ(l.h, h);
    EXPECT_EQ(l.e, e);
    EXPECT_NEAR(l.alpha_m + l.alpha_h + l.alpha_e, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(l.alpha_h, static_cast<double>(h) / n);
  }
}

TEST(Property, CalibrationMatchesBruteForce) {
  std::mt19937_64 rng(9);
  for (int t = 0; t < kTrials; ++t) {
    const int n = 2 + static_cast<int>(rng() % 25);
    std::vector<double> scores;
    std::vector<bool> labels;
    for (int i = 0; i < n; ++i) {
      scores.push_back(static_cast<double>(rng() % 9) / 4.0);
      labels.push_back(rng() % 2 == 0);
    }
    const auto pos = std::count(labels.begin(), labels.end(), true);
    if (pos == 0 || pos == n) continue;
    std::vector<double> distinct = scores;
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    const auto c = calibrate_threshold(scores, labels);
    if (distinct.size() == 1) {
      EXPECT_TRUE(c.degenerate);
      continue;
    }
    double best_tau = 0, best_j = -2;
    for (std::size_t k = 0; k + 1 < distinct.size(); ++k) {
      const double tau = (distinct[k] + distinct[k + 1]) / 2;
      double tp = 0, fp = 0;
      for (int i = 0; i < n; ++i)
        if (scores[i] > tau) (labels[i] ? tp : fp) += 1;
      const double j = tp / pos - fp / static_cast<double>(n - pos);
      if (j > best_j + 1e-12) best_j = j, best_tau = tau;
    }
    EXPECT_NEAR(c.tau, best_tau, 1e-12);
    EXPECT_NEAR(c.youden_j, best_j, 1e-12);
  }
}

TEST(Property, PerturbationsPreserveShapeAndRange) {
  std::mt19937_64 rng(10);
  const TransformPreset tps[] = {TransformPreset::None, TransformPreset::Trans1, TransformPreset::Trans2,
                                 TransformPreset::Trans3, TransformPreset::Trans4};
  const NoisePreset nps[] = {NoisePreset::Noise1, NoisePreset::Noise2, NoisePreset::Noise3, NoisePreset::Noise4};
  for (int t = 0; t < 40; ++t) {
    const int w = 1 + static_cast<int>(rng() % 20), h = 1 + static_cast<int>(rng() % 20);
    const int c = (rng() % 2) ? 3 : 1;
    const auto img = gradient_image(w, h, c, static_cast<unsigned>(t));
    const auto seed = rng();
    const auto a = apply_weak_transform(img, weak_transform_preset(tps[t % 5]), seed);
    const auto b = apply_distortion(img, distortion_preset(nps[t % 4]), seed);
    for (const auto* out : {&a, &b}) {
      EXPECT_EQ(out->width, w);
      EXPECT_EQ(out->height, h);
      EXPECT_EQ(out->channels, c);
      ASSERT_EQ(out->pixels.size(), img.pixels.size());
      for (float v : out->pixels) {
        EXPECT_GE(v, 0.0f);
        EXPECT_LE(v, 1.0f);
      }
    }
    EXPECT_EQ(apply_distortion(img, distortion_preset(nps[t % 4]), seed).pixels, b.pixels);
  }
}
