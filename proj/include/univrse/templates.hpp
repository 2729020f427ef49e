// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace univrse {

/// A prompt with `{name}` slots and a declared top-level output schema.
/// Schema maps required keys to one of: "string", "string[]", "object[]".
struct PromptTemplate {
  std::string id;
  std::string text;
  std::string sha256;
  std::map<std::string, std::string> schema;

  std::vector<std::string> placeholders() const;
  std::string render(const std::map<std::string, std::string>& inputs) const;
  /// Empty string when valid, otherwise the first violation.
  std::string check_schema(const nlohmann::json& doc) const;
};

class TemplateRegistry {
 public:
  /// Loads registry.json and verifies every file against its recorded SHA-256.
  static TemplateRegistry load(const std::filesystem::path& registry_file);
  static TemplateRegistry load_default();
  static std::filesystem::path default_path();

  void add(PromptTemplate tpl);
  const PromptTemplate& get(const std::string& id) const;
  bool contains(const std::string& id) const { return templates_.count(id) != 0; }

  /// template_id -> sha256, for run provenance.
  std::map<std::string, std::string> hashes() const;

 private:
  std::map<std::string, PromptTemplate> templates_;
};

namespace templates {
inline constexpr const char* kDecomposeClaims = "decompose_claims.v1";
inline constexpr const char* kDecomposeFacts = "decompose_facts.v1";
inline constexpr const char* kMatchClaims = "match_claims.v1";
inline constexpr const char* kVerificationQuestion = "verification_question.v1";
inline constexpr const char* kEntailment = "entailment.v1";
}  // namespace templates

}  // namespace univrse
