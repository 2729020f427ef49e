// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/templates.hpp"

#include <cctype>
#include <fstream>
#include <iterator>
#include <set>

#include "univrse/digest.hpp"
#include "univrse/error.hpp"

namespace univrse {
namespace {

bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Calls fn(name, begin, end) for every `{identifier}` slot.
template <typename Fn>
void for_each_slot(const std::string& text, Fn&& fn) {
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] != '{') continue;
    std::size_t j = i + 1;
    while (j < text.size() && is_ident_char(text[j])) ++j;
    if (j > i + 1 && j < text.size() && text[j] == '}') {
      fn(text.substr(i + 1, j - i - 1), i, j + 1);
      i = j;
    }
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

std::vector<std::string> PromptTemplate::placeholders() const {
  std::vector<std::string> names;
  std::set<std::string> seen;
  for_each_slot(text, [&](const std::string& name, std::size_t, std::size_t) {
    if (seen.insert(name).second) names.push_back(name);
  });
  return names;
}

std::string PromptTemplate::render(const std::map<std::string, std::string>& inputs) const {
  std::string out;
  std::size_t last = 0;
  for_each_slot(text, [&](const std::string& name, std::size_t begin, std::size_t end) {
    auto it = inputs.find(name);
    if (it == inputs.end())
      throw Error(ErrorKind::SchemaViolation, "template " + id + " needs input '" + name + "'");
    out.append(text, last, begin - last);
    out += it->second;
    last = end;
  });
  out.append(text, last, std::string::npos);
  return out;
}

std::string PromptTemplate::check_schema(const nlohmann::json& doc) const {
  if (!doc.is_object()) return "top-level value is not an object";
  for (const auto& [key, type] : schema) {
    if (!doc.contains(key)) return "missing key '" + key + "'";
    const auto& v = doc.at(key);
    if (type == "string") {
      if (!v.is_string()) return "'" + key + "' is not a string";
    } else if (type == "string[]" || type == "object[]") {
      if (!v.is_array()) return "'" + key + "' is not an array";
      for (const auto& e : v) {
        if (type == "string[]" && !e.is_string()) return "'" + key + "' holds a non-string";
        if (type == "object[]" && !e.is_object()) return "'" + key + "' holds a non-object";
      }
    } else {
      return "unknown schema type '" + type + "'";
    }
  }
  return {};
}

TemplateRegistry TemplateRegistry::load(const std::filesystem::path& registry_file) {
  nlohmann::json reg;
  try {
    reg = nlohmann::json::parse(read_file(registry_file));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::ConfigError, registry_file.string() + ": " + e.what());
  }
  TemplateRegistry out;
  const auto base = registry_file.parent_path();
  for (const auto& [id, entry] : reg.at("templates").items()) {
    PromptTemplate tpl;
    tpl.id = id;
    tpl.text = read_file(base / entry.at("path").get<std::string>());
    tpl.sha256 = sha256_hex(tpl.text);
    const auto expected = entry.at("sha256").get<std::string>();
    if (expected != tpl.sha256)
      throw Error(ErrorKind::ConfigError, "template " + id + " does not match its registry hash");
    tpl.schema = entry.at("schema").get<std::map<std::string, std::string>>();
    out.add(std::move(tpl));
  }
  return out;
}

std::filesystem::path TemplateRegistry::default_path() {
  return std::filesystem::path(UNIVRSE_DEFAULT_TEMPLATE_DIR) / "registry.json";
}

TemplateRegistry TemplateRegistry::load_default() { return load(default_path()); }

void TemplateRegistry::add(PromptTemplate tpl) {
  if (tpl.sha256.empty()) tpl.sha256 = sha256_hex(tpl.text);
  auto id = tpl.id;
  templates_.insert_or_assign(std::move(id), std::move(tpl));
}

const PromptTemplate& TemplateRegistry::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error(ErrorKind::ConfigError, "unknown template '" + id + "'");
  return it->second;
}

std::map<std::string, std::string> TemplateRegistry::hashes() const {
  std::map<std::string, std::string> out;
  for (const auto& [id, tpl] : templates_) out[id] = tpl.sha256;
  return out;
}

}  // namespace univrse
