// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace univrse {

std::string sha256_hex(std::span<const std::uint8_t> bytes);
std::string sha256_hex(std::string_view text);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

/// Stable 64-bit string hash (FNV-1a); std::hash is not stable across builds.
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// SplitMix64 finalizer used for all seed derivation.
std::uint64_t mix64(std::uint64_t x) noexcept;

inline std::uint64_t derive_seed(std::uint64_t base, std::string_view label) noexcept {
  return mix64(base ^ mix64(fnv1a64(label)));
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t index) noexcept {
  return mix64(base + 0x9E3779B97F4A7C15ULL * (index + 1));
}

}  // namespace univrse
