// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <cmath>
#include <mutex>
#include <set>

#include "support/fixtures.hpp"
#include "univrse/digest.hpp"
#include "univrse/error.hpp"
#include "univrse/scripted.hpp"
#include "univrse/semantic.hpp"
#include "univrse/vcse.hpp"

using namespace univrse;
using namespace univrse::testing;

namespace {

GenSample sample(const std::string& text, std::vector<double> lps) {
  return GenSample::from_result(result(text, lps), 0);
}

SemanticDistribution dist(std::vector<std::string> reps, std::vector<double> probs) {
  SemanticDistribution d;
  for (std::size_t i = 0; i < reps.size(); ++i) {
    SemanticClass c;
    c.id = static_cast<int>(i);
    c.representative = reps[i];
    c.member_indices = {i};
    c.mass = probs[i];
    d.classes.push_back(c);
  }
  d.probs = std::move(probs);
  return d;
}

// Equivalence on the first character of the answer.
FnNli first_letter_nli() {
  return FnNli(nli_by_key([](std::string_view s) { return std::string(s.substr(0, 1)); }));
}

VseConfig scripted_vse_config() {
  VseConfig cfg;
  cfg.spd.samples = 2;
  cfg.spd.workers = 2;
  return cfg;
}

double entropy_oracle(const std::vector<double>& p) {
  double h = 0.0;
  for (double x : p)
    if (x > 0) h -= x * std::log(x);
  return h;
}

}  // namespace

TEST(SequenceProb, Examples) {
  EXPECT_DOUBLE_EQ(sequence_prob(sample("a", {0.0, 0.0})), 1.0);
  EXPECT_NEAR(sequence_prob(sample("a", {-std::log(2.0), -std::log(2.0)})), 0.25, 1e-15);
  EXPECT_NEAR(sequence_prob(sample("a", {-std::log(2.0), -std::log(2.0)}), true), 0.5, 1e-15);
  EXPECT_THROW(sequence_prob(sample("", {})), Error);
  const auto s = sample("x", {-0.1, -0.2, -0.3});
  EXPECT_NEAR(s.seq_logprob, -0.6, 1e-12);
}

TEST(Cluster, Examples) {
  const std::vector<GenSample> three{sample("A", {0}), sample("B", {0}), sample("A'", {0})};
  FnNli all([](std::string_view, std::string_view) { return EntailmentVerdict{true, true}; });
  EXPECT_EQ(cluster_responses(three, all, "").size(), 1u);
  FnNli none([](std::string_view, std::string_view) { return EntailmentVerdict{false, false}; });
  const std::vector<GenSample> distinct{sample("A", {0}), sample("B", {0}), sample("C", {0})};
  EXPECT_EQ(cluster_responses(distinct, none, "").size(), 3u);
  auto nli = first_letter_nli();
  const auto classes = cluster_responses(three, nli, "ctx");
  ASSERT_EQ(classes.size(), 2u);
  EXPECT_EQ(classes[0].representative, "A");
  EXPECT_EQ(classes[0].member_indices, (std::vector<std::size_t>{0, 2}));
  EXPECT_EQ(classes[1].member_indices, (std::vector<std::size_t>{1}));
  EXPECT_THROW(cluster_responses(std::vector<GenSample>{}, nli, ""), Error);
}

TEST(Aggregate, HandAggregationExample) {
  const std::vector<GenSample> s{sample("A", {std::log(0.2)}), sample("A2", {std::log(0.1)}),
                                 sample("B", {std::log(0.05)})};
  auto nli = first_letter_nli();
  bool degenerate = true;
  const auto d = aggregate_classes(cluster_responses(s, nli, ""), s, false, false, &degenerate);
  EXPECT_FALSE(degenerate);
  ASSERT_EQ(d.probs.size(), 2u);
  EXPECT_NEAR(d.classes[0].mass, 0.3, 1e-12);
  EXPECT_NEAR(d.classes[1].mass, 0.05, 1e-12);
  EXPECT_NEAR(d.probs[0], 6.0 / 7.0, 1e-12);
  EXPECT_NEAR(d.probs[1], 1.0 / 7.0, 1e-12);
  const auto raw = aggregate_classes(cluster_responses(s, nli, ""), s, false, true);
  EXPECT_NEAR(raw.probs[0], 0.3, 1e-12);
}

TEST(Aggregate, ZeroMassFallsBackToUniform) {
  const std::vector<GenSample> s{sample("A", {kNegInf}), sample("B", {kNegInf})};
  auto nli = first_letter_nli();
  bool degenerate = false;
  const auto d = aggregate_classes(cluster_responses(s, nli, ""), s, false, false, &degenerate);
  EXPECT_TRUE(degenerate);
  EXPECT_EQ(d.probs, (std::vector<double>{0.5, 0.5}));
}

TEST(EstimateSpd, ScriptedSamplesAreTaggedAndSeeded) {
  std::vector<std::string> branches;
  std::mutex mu;
  FnVlm vlm([&](const GenerationRequest& req) {
    std::lock_guard lock(mu);
    branches.push_back(req.tags.branch + std::to_string(req.tags.sample_index));
    EXPECT_TRUE(req.seed.has_value());
    return result(req.tags.sample_index < 2 ? "A" : "B", {std::log(0.1)});
  });
  auto nli = first_letter_nli();
  SpdConfig cfg;
  cfg.samples = 4;
  const auto img = gradient_image(12, 12);
  const auto est = estimate_spd(img, "Q?", cfg, WeakTransformConfig{}, vlm, nli, 77, "original");
  EXPECT_EQ(vlm.calls.load(), 4);
  EXPECT_EQ(branches.size(), 4u);
  EXPECT_TRUE(est.transformed);
  ASSERT_EQ(est.distribution.size(), 2u);
  EXPECT_NEAR(est.distribution.probs[0], 0.5, 1e-12);
  EXPECT_EQ(est.samples[0].transform_seed, derive_seed(77, std::uint64_t{0}));
  EXPECT_NE(est.samples[0].transform_seed, est.samples[1].transform_seed);

  // Identical texts collapse into one class with probability 1.
  FnVlm same([](const GenerationRequest&) { return result("same", {-3.0}); });
  cfg.samples = 2;
  EXPECT_EQ(estimate_spd(img, "Q?", cfg, WeakTransformConfig{}, same, nli, 1, "original").distribution.probs,
            std::vector<double>{1.0});
  cfg.samples = 1;
  EXPECT_THROW(estimate_spd(img, "Q?", cfg, WeakTransformConfig{}, same, nli, 1, "original"), Error);
}

TEST(EstimateSpd, AllNegInfIsDegenerateUniform) {
  FnVlm vlm([](const GenerationRequest& req) { return result(req.tags.sample_index % 2 ? "A" : "B", {kNegInf}); });
  auto nli = first_letter_nli();
  SpdConfig cfg;
  cfg.samples = 4;
  const auto est = estimate_spd(gradient_image(8, 8), "Q?", cfg, WeakTransformConfig{}, vlm, nli, 3, "original");
  EXPECT_TRUE(est.degenerate);
  EXPECT_EQ(est.distribution.probs, (std::vector<double>{0.5, 0.5}));
}

TEST(Align, Examples) {
  auto nli = FnNli(nli_by_key([](std::string_view s) { return std::string(s.substr(0, 1)); }));
  const auto same = align_class_sets(dist({"X", "Y"}, {0.7, 0.3}), dist({"Y", "X"}, {0.4, 0.6}), nli, "");
  EXPECT_EQ(same.representatives, (std::vector<std::string>{"X", "Y"}));
  EXPECT_EQ(same.p_b, (std::vector<double>{0.6, 0.4}));
  const auto disjoint = align_class_sets(dist({"X"}, {1.0}), dist({"Z"}, {1.0}), nli, "");
  EXPECT_EQ(disjoint.p_a, (std::vector<double>{1.0, 0.0}));
  EXPECT_EQ(disjoint.p_b, (std::vector<double>{0.0, 1.0}));
  const auto merged = align_class_sets(dist({"X", "Y"}, {0.7, 0.3}), dist({"X'"}, {1.0}), nli, "");
  EXPECT_EQ(merged.p_a, (std::vector<double>{0.7, 0.3}));
  EXPECT_EQ(merged.p_b, (std::vector<double>{1.0, 0.0}));
}

TEST(Contrast, ClosedFormExamples) {
  const std::vector<double> half{0.5, 0.5}, one{1.0, 0.0}, other{0.0, 1.0};
  for (double lambda : {0.0, 1.0, 3.0}) {
    const auto q = contrast_distributions(half, half, lambda);
    EXPECT_NEAR(q[0], 0.5, 1e-15);
  }
  // Oracle: softmax evaluated directly from its definition.
  const double e = std::exp(1.0);
  auto q = contrast_distributions(one, one, 1.0);
  EXPECT_NEAR(q[0], e / (e + 1.0), 1e-15);
  EXPECT_NEAR(q[0], 0.731058, 1e-6);
  EXPECT_NEAR(q[1], 0.268941, 1e-6);
  q = contrast_distributions(one, other, 1.0);
  EXPECT_NEAR(q[0], std::exp(2.0) / (std::exp(2.0) + std::exp(-1.0)), 1e-15);
  EXPECT_NEAR(q[0], 0.952574, 1e-6);
  EXPECT_NEAR(q[1], 0.047425, 1e-6);
  q = contrast_distributions(one, other, 0.0);
  EXPECT_NEAR(q[0], e / (e + 1.0), 1e-15);
}

TEST(Contrast, ErrorPaths) {
  const std::vector<double> a{1.0}, b{0.5, 0.5}, bad{0.5, 0.6};
  EXPECT_THROW(contrast_distributions(a, b, 1.0), Error);
  EXPECT_THROW(contrast_distributions(b, b, -0.1), Error);
  EXPECT_THROW(contrast_distributions(bad, b, 1.0), Error);
  try {
    shannon_entropy(bad);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NotADistribution);
  }
}

TEST(Entropy, Examples) {
  EXPECT_EQ(shannon_entropy(std::vector<double>{1.0}), 0.0);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0.25, 0.25, 0.25, 0.25}), std::log(4.0), 1e-15);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0.731058, 0.268941}), 0.582203, 1e-6);
  EXPECT_NEAR(shannon_entropy(std::vector<double>{0.5, 0.0, 0.5}), std::log(2.0), 1e-15);
}

TEST(ComputeVse, ScriptedScenarios) {
  const auto img = gradient_image(16, 16);
  const double prior_expected = entropy_oracle({std::exp(1.0) / (std::exp(1.0) + 1), 1 / (std::exp(1.0) + 1)});
  const double z = std::exp(2.0) + std::exp(-1.0);
  const double grounded_expected = entropy_oracle({std::exp(2.0) / z, std::exp(-1.0) / z});

  auto run = [&](const nlohmann::json& script) {
    auto s = std::make_shared<const Script>(Script::parse(script));
    ScriptedVlm vlm(s);
    ScriptedNli nli(s);
    return compute_vse(img, "Q?", scripted_vse_config(), vlm, nli, 5);
  };
  const auto prior = run(prior_driven_script("Q?"));
  const auto grounded = run(grounded_script("Q?"));
  EXPECT_NEAR(prior.score.value, prior_expected, 1e-12);
  EXPECT_NEAR(prior.score.value, 0.582203, 1e-6);
  EXPECT_NEAR(grounded.score.value, grounded_expected, 1e-12);
  EXPECT_NEAR(grounded.score.value, 0.190865, 1e-6);
  EXPECT_GT(prior.score.value, grounded.score.value);
  EXPECT_EQ(prior.score.n_classes, 2);
  EXPECT_EQ(grounded.vsd.p_dist, (std::vector<double>{0.0, 1.0}));

  // Single-class version: both branches always say "A".
  const nlohmann::json a = {scripted("A", {0.0})};
  const auto single = run(branch_script("Q?", a, a));
  EXPECT_EQ(single.score.value, 0.0);
  EXPECT_EQ(single.score.n_classes, 1);
  EXPECT_DOUBLE_EQ(recompute_vse(prior.vsd), prior.score.value);
}

TEST(ComputeVse, PlacementControlsOriginalBranchTransforms) {
  auto s = std::make_shared<const Script>(Script::parse(prior_driven_script("Q?")));
  ScriptedVlm vlm(s);
  ScriptedNli nli(s);
  auto cfg = scripted_vse_config();
  cfg.placement = TransformPlacement::DistortedOnly;
  const auto r = compute_vse(gradient_image(16, 16), "Q?", cfg, vlm, nli, 5);
  EXPECT_FALSE(r.original.transformed);
  EXPECT_TRUE(r.distorted.transformed);
  cfg.placement = TransformPlacement::Both;
  EXPECT_TRUE(compute_vse(gradient_image(16, 16), "Q?", cfg, vlm, nli, 5).original.transformed);
  EXPECT_EQ(parse_placement("distorted_only"), TransformPlacement::DistortedOnly);
  EXPECT_THROW(parse_placement("neither"), Error);
}

TEST(ComputeVse, BranchesSeeImagesThatDiffer) {
  std::mutex mu;
  std::set<std::string> original, distorted;
  FnVlm vlm([&](const GenerationRequest& req) {
    std::lock_guard lock(mu);
    const auto digest = std::string(req.image_png->begin(), req.image_png->end());
    (req.tags.branch == "original" ? original : distorted).insert(digest);
    return result("A", {-0.1});
  });
  auto nli = first_letter_nli();
  VseConfig cfg;
  cfg.spd.samples = 3;
  cfg.placement = TransformPlacement::DistortedOnly;
  compute_vse(gradient_image(16, 16), "Q?", cfg, vlm, nli, 9);
  EXPECT_EQ(original.size(), 1u);  // untransformed original image every time
  EXPECT_EQ(distorted.size(), 3u);
  for (const auto& d : distorted) EXPECT_FALSE(original.count(d));
}

TEST(Calibrate, Examples) {
  auto cal = calibrate_threshold(std::vector<double>{0.1, 0.2, 0.8, 0.9}, {false, false, true, true});
  EXPECT_DOUBLE_EQ(cal.tau, 0.5);
  EXPECT_DOUBLE_EQ(cal.youden_j, 1.0);
  cal = calibrate_threshold(std::vector<double>{0.1, 0.3, 0.5, 0.9}, {false, true, false, true});
  EXPECT_NEAR(cal.tau, 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(cal.youden_j, 0.5);
  cal = calibrate_threshold(std::vector<double>{0.4, 0.4, 0.4}, {false, true, true});
  EXPECT_TRUE(cal.degenerate);
  EXPECT_DOUBLE_EQ(cal.tau, 0.4);
  try {
    calibrate_threshold(std::vector<double>{0.1, 0.2}, {true, true});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::SingleClassLabels);
  }
  EXPECT_TRUE(flag_hallucination(0.6, 0.5));
  EXPECT_FALSE(flag_hallucination(0.5, 0.5));
}
