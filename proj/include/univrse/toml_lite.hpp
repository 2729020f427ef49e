// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string_view>

#include <json.hpp>

namespace univrse::toml {

/// Reads the TOML subset used by run configuration files: tables, arrays of
/// tables, dotted keys, strings, numbers, booleans, arrays and inline tables.
/// Dates and multi-line strings are not supported. Throws ConfigError.
nlohmann::json parse(std::string_view text);
nlohmann::json parse_file(const std::filesystem::path& path);

}  // namespace univrse::toml
