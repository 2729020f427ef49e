// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace univrse {

/// Row-major, interleaved image with samples in [0,1].
struct ImageTensor {
  int width = 0;
  int height = 0;
  int channels = 0;  // 1 (gray) or 3 (RGB)
  std::vector<float> pixels;

  ImageTensor() = default;
  ImageTensor(int w, int h, int c, float fill = 0.0f)
      : width(w), height(h), channels(c), pixels(static_cast<std::size_t>(w) * h * c, fill) {}

  float& at(int x, int y, int c) { return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c]; }
  float at(int x, int y, int c) const {
    return pixels[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }

  bool operator==(const ImageTensor&) const = default;
};

/// Throws InvalidConfig when shape or value-range invariants are broken.
void validate(const ImageTensor& img);

ImageTensor load_image(const std::filesystem::path& path);
ImageTensor decode_image(std::span<const std::uint8_t> bytes);

/// 8-bit PNG, the transport encoding for backend calls.
std::vector<std::uint8_t> encode_png(const ImageTensor& img);

}  // namespace univrse
