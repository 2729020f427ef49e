// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <random>

#include "support/fixtures.hpp"
#include "univrse/error.hpp"
#include "univrse/perturb.hpp"

using namespace univrse;
using namespace univrse::testing;

namespace {

double mean(const ImageTensor& img) {
  double s = 0.0;
  for (float v : img.pixels) s += v;
  return s / static_cast<double>(img.pixels.size());
}

bool in_unit_range(const ImageTensor& img) {
  for (float v : img.pixels)
    if (!(v >= 0.0f && v <= 1.0f)) return false;
  return true;
}

}  // namespace

TEST(LoadImage, BlackAndWhite) {
  TempDir tmp;
  write_png(tmp / "black.png", ImageTensor(2, 2, 1, 0.0f));
  write_png(tmp / "white.png", ImageTensor(2, 2, 3, 1.0f));
  const auto black = load_image(tmp / "black.png");
  EXPECT_EQ(black.channels, 1);
  for (float v : black.pixels) EXPECT_EQ(v, 0.0f);
  const auto white = load_image(tmp / "white.png");
  EXPECT_EQ(white.channels, 3);
  for (float v : white.pixels) EXPECT_EQ(v, 1.0f);
}

TEST(WeakTransform, IdentityParametersAreExact) {
  const auto img = gradient_image(31, 23, 3);
  for (std::uint64_t seed : {0ULL, 1ULL, 99ULL}) EXPECT_EQ(apply_weak_transform(img, WeakTransformConfig::identity(), seed), img);
  auto disabled = WeakTransformConfig{};
  disabled.enabled = false;
  EXPECT_EQ(apply_weak_transform(img, disabled, 5), img);
}

TEST(WeakTransform, BrightnessScalesPointwise) {
  auto cfg = WeakTransformConfig::identity();
  cfg.brightness = {1.2, 1.2};
  const auto out = apply_weak_transform(ImageTensor(8, 8, 3, 0.5f), cfg, 3);
  for (float v : out.pixels) EXPECT_NEAR(v, 0.6f, 1e-6);
}

TEST(WeakTransform, DeterministicAndSeedSensitive) {
  const auto img = gradient_image(40, 30, 3);
  const WeakTransformConfig cfg;
  EXPECT_EQ(apply_weak_transform(img, cfg, 11), apply_weak_transform(img, cfg, 11));
  EXPECT_NE(apply_weak_transform(img, cfg, 11), apply_weak_transform(img, cfg, 12));
}

TEST(WeakTransform, ShapeAndRangePreserved) {
  for (int c : {1, 3}) {
    const auto img = gradient_image(13, 29, c);
    for (auto preset : {TransformPreset::Trans1, TransformPreset::Trans2, TransformPreset::Trans3, TransformPreset::Trans4}) {
      for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto out = apply_weak_transform(img, weak_transform_preset(preset), seed);
        EXPECT_EQ(out.width, img.width);
        EXPECT_EQ(out.height, img.height);
        EXPECT_EQ(out.channels, img.channels);
        EXPECT_TRUE(in_unit_range(out));
      }
    }
  }
}

TEST(WeakTransform, InvalidConfigRejected) {
  WeakTransformConfig cfg;
  cfg.crop_area = {0.0, 1.0};
  EXPECT_THROW(apply_weak_transform(gradient_image(4, 4), cfg, 1), Error);
  cfg = {};
  cfg.rotation_deg = {5.0, -5.0};
  EXPECT_THROW(validate(cfg), Error);
  cfg = {};
  cfg.translate_max_frac = 1.0;
  EXPECT_THROW(validate(cfg), Error);
}

TEST(Presets, TransLadderWidensFromDefaults) {
  const auto t1 = weak_transform_preset(TransformPreset::Trans1);
  const WeakTransformConfig defaults;
  EXPECT_EQ(t1.crop_area.lo, defaults.crop_area.lo);
  EXPECT_EQ(t1.rotation_deg.hi, defaults.rotation_deg.hi);
  const auto t4 = weak_transform_preset(TransformPreset::Trans4);
  EXPECT_DOUBLE_EQ(t4.rotation_deg.hi, 25.0);
  EXPECT_DOUBLE_EQ(t4.crop_area.lo, 0.75);
  EXPECT_DOUBLE_EQ(t4.brightness.lo, 0.5);
  EXPECT_DOUBLE_EQ(t4.contrast.hi, 1.5);
  EXPECT_FALSE(weak_transform_preset(TransformPreset::None).enabled);
  EXPECT_EQ(parse_transform_preset("trans3"), TransformPreset::Trans3);
  EXPECT_THROW(parse_transform_preset("trans9"), Error);
}

TEST(Presets, NoiseLadder) {
  const double stds[] = {0.03, 0.05, 0.07, 0.09};
  const double scales[] = {30, 50, 70, 90};
  const NoisePreset presets[] = {NoisePreset::Noise1, NoisePreset::Noise2, NoisePreset::Noise3, NoisePreset::Noise4};
  for (int i = 0; i < 4; ++i) {
    const auto d = distortion_preset(presets[i]);
    EXPECT_DOUBLE_EQ(d.gaussian_std, stds[i]);
    EXPECT_DOUBLE_EQ(d.poisson_scale, scales[i]);
    EXPECT_EQ(parse_noise_preset(to_string(presets[i])), presets[i]);
  }
  const DistortionConfig defaults;
  EXPECT_DOUBLE_EQ(defaults.gaussian_std, 0.07);
  EXPECT_DOUBLE_EQ(defaults.poisson_scale, 70.0);
}

TEST(Distortion, VanishingNoiseLimit) {
  const DistortionConfig cfg{0.0, 1e7};
  const auto out = apply_distortion(ImageTensor(10, 10, 3, 0.5f), cfg, 4);
  for (float v : out.pixels) EXPECT_NEAR(v, 0.5f, 0.01);
}

TEST(Distortion, DefaultNoiseIsCenteredOnConstantImage) {
  const ImageTensor img(25, 40, 1, 0.5f);  // 1000 pixels
  double total = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double m = mean(apply_distortion(img, DistortionConfig{}, seed));
    EXPECT_NEAR(m, 0.5, 0.02);
    total += m;
  }
  EXPECT_NEAR(total / 20.0, 0.5, 0.01);
}

TEST(Distortion, DeterministicRangeShape) {
  const auto img = gradient_image(20, 20, 3);
  const DistortionConfig cfg{0.09, 30};
  EXPECT_EQ(apply_distortion(img, cfg, 9), apply_distortion(img, cfg, 9));
  EXPECT_NE(apply_distortion(img, cfg, 9), apply_distortion(img, cfg, 10));
  const auto out = apply_distortion(img, cfg, 9);
  EXPECT_TRUE(in_unit_range(out));
  EXPECT_EQ(out.width, 20);
  EXPECT_THROW(apply_distortion(img, DistortionConfig{-0.1, 70}, 1), Error);
  EXPECT_THROW(apply_distortion(img, DistortionConfig{0.1, 0.0}, 1), Error);
}

TEST(Distortion, GaussianOnlyStdMatches) {
  // With huge Poisson scale the residual is the Gaussian term alone.
  const ImageTensor img(100, 100, 1, 0.5f);
  const auto out = apply_distortion(img, DistortionConfig{0.05, 1e9}, 21);
  double s2 = 0.0;
  for (float v : out.pixels) s2 += (v - 0.5) * (v - 0.5);
  EXPECT_NEAR(std::sqrt(s2 / 10000.0), 0.05, 0.003);
}
