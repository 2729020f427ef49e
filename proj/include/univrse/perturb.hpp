// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string_view>

#include "univrse/image.hpp"

namespace univrse {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Semantics-preserving jitter used to diversify sampled responses.
struct WeakTransformConfig {
  Range crop_area{0.90, 1.00};       // fraction of the original area kept
  Range rotation_deg{-10.0, 10.0};
  double translate_max_frac = 0.10;  // of width / height
  Range brightness{0.8, 1.2};
  Range contrast{0.8, 1.2};
  bool enabled = true;

  static WeakTransformConfig identity();
};

enum class TransformPreset { None, Trans1, Trans2, Trans3, Trans4 };

WeakTransformConfig weak_transform_preset(TransformPreset preset);
TransformPreset parse_transform_preset(std::string_view name);
std::string_view to_string(TransformPreset preset);

/// Detail-degrading noise for the contrast branch.
struct DistortionConfig {
  double gaussian_std = 0.07;
  double poisson_scale = 70.0;
};

enum class NoisePreset { Noise1, Noise2, Noise3, Noise4 };

DistortionConfig distortion_preset(NoisePreset preset);
NoisePreset parse_noise_preset(std::string_view name);
std::string_view to_string(NoisePreset preset);

void validate(const WeakTransformConfig& cfg);
void validate(const DistortionConfig& cfg);

/// Random crop (resampled back to full size), rotation and translation with
/// edge replication, then brightness and contrast. Bilinear sampling.
ImageTensor apply_weak_transform(const ImageTensor& img, const WeakTransformConfig& cfg,
                                 std::uint64_t seed);

/// clamp(Poisson(v * scale) / scale + N(0, std), 0, 1) per sample.
ImageTensor apply_distortion(const ImageTensor& img, const DistortionConfig& cfg, std::uint64_t seed);

}  // namespace univrse
