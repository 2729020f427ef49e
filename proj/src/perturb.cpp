// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/perturb.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <string>

#include "univrse/error.hpp"

namespace univrse {
namespace {

using Rng = std::mt19937_64;

// Unlike std::uniform_real_distribution this is well defined for lo == hi and
// returns lo exactly, which keeps identity configurations exact.
double draw(Rng& rng, Range r) {
  const double u = std::generate_canonical<double, 53>(rng);
  return r.lo + (r.hi - r.lo) * u;
}

float sample_bilinear(const ImageTensor& img, double sx, double sy, int c) {
  sx = std::clamp(sx, 0.0, static_cast<double>(img.width - 1));
  sy = std::clamp(sy, 0.0, static_cast<double>(img.height - 1));
  const int x0 = static_cast<int>(std::floor(sx));
  const int y0 = static_cast<int>(std::floor(sy));
  const int x1 = std::min(x0 + 1, img.width - 1);
  const int y1 = std::min(y0 + 1, img.height - 1);
  const double fx = sx - x0;
  const double fy = sy - y0;
  const double top = img.at(x0, y0, c) * (1.0 - fx) + img.at(x1, y0, c) * fx;
  const double bottom = img.at(x0, y1, c) * (1.0 - fx) + img.at(x1, y1, c) * fx;
  return static_cast<float>(top * (1.0 - fy) + bottom * fy);
}

void clamp_unit(ImageTensor& img) {
  for (float& v : img.pixels) v = std::clamp(v, 0.0f, 1.0f);
}

void check_range(Range r, const char* name) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw Error(ErrorKind::InvalidConfig, std::string(name) + " range is empty");
}

}  // namespace

WeakTransformConfig WeakTransformConfig::identity() {
  WeakTransformConfig cfg;
  cfg.crop_area = {1.0, 1.0};
  cfg.rotation_deg = {0.0, 0.0};
  cfg.translate_max_frac = 0.0;
  cfg.brightness = {1.0, 1.0};
  cfg.contrast = {1.0, 1.0};
  return cfg;
}

WeakTransformConfig weak_transform_preset(TransformPreset preset) {
  WeakTransformConfig cfg;
  if (preset == TransformPreset::None) {
    cfg.enabled = false;
    return cfg;
  }
  // Each level past Trans1 widens rotation by 5 degrees, lowers the crop
  // floor by 5%, widens the jitter by 0.1 and the translation by 5%.
  const int step = static_cast<int>(preset) - static_cast<int>(TransformPreset::Trans1);
  cfg.crop_area = {0.90 - 0.05 * step, 1.0};
  cfg.rotation_deg = {-10.0 - 5.0 * step, 10.0 + 5.0 * step};
  cfg.translate_max_frac = 0.10 + 0.05 * step;
  cfg.brightness = {0.8 - 0.1 * step, 1.2 + 0.1 * step};
  cfg.contrast = cfg.brightness;
  return cfg;
}

TransformPreset parse_transform_preset(std::string_view name) {
  if (name == "none") return TransformPreset::None;
  if (name == "trans1") return TransformPreset::Trans1;
  if (name == "trans2") return TransformPreset::Trans2;
  if (name == "trans3") return TransformPreset::Trans3;
  if (name == "trans4") return TransformPreset::Trans4;
  throw Error(ErrorKind::InvalidConfig, "unknown transform preset '" + std::string(name) + "'");
}

std::string_view to_string(TransformPreset preset) {
  switch (preset) {
    case TransformPreset::None: return "none";
    case TransformPreset::Trans1: return "trans1";
    case TransformPreset::Trans2: return "trans2";
    case TransformPreset::Trans3: return "trans3";
    case TransformPreset::Trans4: return "trans4";
  }
  return "none";
}

DistortionConfig distortion_preset(NoisePreset preset) {
  switch (preset) {
    case NoisePreset::Noise1: return {0.03, 30.0};
    case NoisePreset::Noise2: return {0.05, 50.0};
    case NoisePreset::Noise3: return {0.07, 70.0};
    case NoisePreset::Noise4: return {0.09, 90.0};
  }
  return {};
}

NoisePreset parse_noise_preset(std::string_view name) {
  if (name == "noise1") return NoisePreset::Noise1;
  if (name == "noise2") return NoisePreset::Noise2;
  if (name == "noise3") return NoisePreset::Noise3;
  if (name == "noise4") return NoisePreset::Noise4;
  throw Error(ErrorKind::InvalidConfig, "unknown noise preset '" + std::string(name) + "'");
}

std::string_view to_string(NoisePreset preset) {
  switch (preset) {
    case NoisePreset::Noise1: return "noise1";
    case NoisePreset::Noise2: return "noise2";
    case NoisePreset::Noise3: return "noise3";
    case NoisePreset::Noise4: return "noise4";
  }
  return "noise3";
}

void validate(const WeakTransformConfig& cfg) {
  check_range(cfg.crop_area, "crop_area");
  check_range(cfg.rotation_deg, "rotation");
  check_range(cfg.brightness, "brightness");
  check_range(cfg.contrast, "contrast");
  if (!(cfg.crop_area.lo > 0.0 && cfg.crop_area.hi <= 1.0))
    throw Error(ErrorKind::InvalidConfig, "crop fractions must lie in (0,1]");
  if (!(cfg.translate_max_frac >= 0.0 && cfg.translate_max_frac < 1.0))
    throw Error(ErrorKind::InvalidConfig, "translate fraction must lie in [0,1)");
  if (cfg.brightness.lo < 0.0 || cfg.contrast.lo < 0.0)
    throw Error(ErrorKind::InvalidConfig, "jitter factors must be non-negative");
}

void validate(const DistortionConfig& cfg) {
  if (!(cfg.gaussian_std >= 0.0) || !std::isfinite(cfg.gaussian_std))
    throw Error(ErrorKind::InvalidConfig, "gaussian_std must be >= 0");
  if (!(cfg.poisson_scale > 0.0) || !std::isfinite(cfg.poisson_scale))
    throw Error(ErrorKind::InvalidConfig, "poisson_scale must be > 0");
}

ImageTensor apply_weak_transform(const ImageTensor& img, const WeakTransformConfig& cfg,
                                 std::uint64_t seed) {
  validate(img);
  validate(cfg);
  if (!cfg.enabled) return img;

  Rng rng(seed);
  const double area = draw(rng, cfg.crop_area);
  const double crop_u = draw(rng, {0.0, 1.0});
  const double crop_v = draw(rng, {0.0, 1.0});
  const double angle = draw(rng, cfg.rotation_deg) * std::numbers::pi / 180.0;
  const double tx = draw(rng, {-cfg.translate_max_frac, cfg.translate_max_frac}) * img.width;
  const double ty = draw(rng, {-cfg.translate_max_frac, cfg.translate_max_frac}) * img.height;
  const double brightness = draw(rng, cfg.brightness);
  const double contrast = draw(rng, cfg.contrast);

  const double side = std::sqrt(area);
  const double crop_w = side * img.width;
  const double crop_h = side * img.height;
  const double x0 = crop_u * (img.width - crop_w);
  const double y0 = crop_v * (img.height - crop_h);
  const double scale_x = crop_w / img.width;
  const double scale_y = crop_h / img.height;
  const double cx = (img.width - 1) / 2.0;
  const double cy = (img.height - 1) / 2.0;
  const double cos_a = std::cos(angle);
  const double sin_a = std::sin(angle);

  // Inverse map: output pixel -> undo translation -> undo rotation about the
  // centre -> position inside the crop window of the source.
  ImageTensor out(img.width, img.height, img.channels);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      const double dx = (x - tx) - cx;
      const double dy = (y - ty) - cy;
      const double u = cx + cos_a * dx + sin_a * dy;
      const double v = cy - sin_a * dx + cos_a * dy;
      const double sx = x0 + (u + 0.5) * scale_x - 0.5;
      const double sy = y0 + (v + 0.5) * scale_y - 0.5;
      for (int c = 0; c < img.channels; ++c) out.at(x, y, c) = sample_bilinear(img, sx, sy, c);
    }
  }

  if (brightness != 1.0) {
    for (float& p : out.pixels) p = static_cast<float>(p * brightness);
    clamp_unit(out);
  }
  if (contrast != 1.0) {
    const double mean =
        std::accumulate(out.pixels.begin(), out.pixels.end(), 0.0) / static_cast<double>(out.pixels.size());
    for (float& p : out.pixels) p = static_cast<float>(mean + contrast * (p - mean));
  }
  clamp_unit(out);
  return out;
}

ImageTensor apply_distortion(const ImageTensor& img, const DistortionConfig& cfg, std::uint64_t seed) {
  validate(img);
  validate(cfg);
  Rng rng(seed);
  std::normal_distribution<double> gaussian(0.0, cfg.gaussian_std > 0.0 ? cfg.gaussian_std : 1.0);
  ImageTensor out = img;
  for (float& p : out.pixels) {
    const double rate = static_cast<double>(p) * cfg.poisson_scale;
    double v = 0.0;
    if (rate > 0.0) {
      std::poisson_distribution<long long> shot(rate);
      v = static_cast<double>(shot(rng)) / cfg.poisson_scale;
    }
    if (cfg.gaussian_std > 0.0) v += gaussian(rng);
    p = static_cast<float>(std::clamp(v, 0.0, 1.0));
  }
  return out;
}

}  // namespace univrse
