// Copyright 2026 The UniVRSE Authors
// SPDX-License-Identifier: Apache-2.0

#include "univrse/toml_lite.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include "univrse/error.hpp"

namespace univrse::toml {
namespace {

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  nlohmann::json run() {
    nlohmann::json root = nlohmann::json::object();
    nlohmann::json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        const bool array = s_.substr(pos_, 2) == "[[";
        pos_ += array ? 2 : 1;
        auto path = parse_key_path();
        skip_ws();
        expect(']');
        if (array) expect(']');
        table = array ? &open_array_table(root, path) : &open_table(root, path);
      } else {
        auto path = parse_key_path();
        skip_ws();
        expect('=');
        skip_ws();
        auto value = parse_value();
        nlohmann::json* target = table;
        for (std::size_t i = 0; i + 1 < path.size(); ++i) target = &descend(*target, path[i]);
        if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
        (*target)[path.back()] = std::move(value);
      }
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i)
      if (s_[i] == '\n') ++line;
    throw Error(ErrorKind::ConfigError, "toml line " + std::to_string(line) + ": " + msg);
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return eof() ? '\0' : s_[pos_]; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        ++pos_;
      else
        break;
    }
  }

  // Whitespace, comments and newlines inside arrays / inline tables.
  void skip_all() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r')
        ++pos_;
      else
        break;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (!eof() && peek() != '\n') fail("unexpected trailing content");
  }

  std::string parse_simple_key() {
    skip_ws();
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    const auto start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_simple_key()};
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      path.push_back(parse_simple_key());
      skip_ws();
    }
    return path;
  }

  nlohmann::json& descend(nlohmann::json& node, const std::string& key) {
    auto& child = node[key];
    if (child.is_null()) child = nlohmann::json::object();
    if (child.is_array()) {
      if (child.empty() || !child.back().is_object()) fail("key '" + key + "' is not a table");
      return child.back();
    }
    if (!child.is_object()) fail("key '" + key + "' is not a table");
    return child;
  }

  nlohmann::json& open_table(nlohmann::json& root, const std::vector<std::string>& path) {
    nlohmann::json* node = &root;
    for (const auto& k : path) node = &descend(*node, k);
    return *node;
  }

  nlohmann::json& open_array_table(nlohmann::json& root, const std::vector<std::string>& path) {
    nlohmann::json* node = &root;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) node = &descend(*node, path[i]);
    auto& arr = (*node)[path.back()];
    if (arr.is_null()) arr = nlohmann::json::array();
    if (!arr.is_array()) fail("key '" + path.back() + "' is not an array of tables");
    arr.push_back(nlohmann::json::object());
    return arr.back();
  }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      c = s_[pos_++];
      switch (c) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'u': {
          if (pos_ + 4 > s_.size()) fail("short \\u escape");
          const unsigned cp = std::stoul(std::string(s_.substr(pos_, 4)), nullptr, 16);
          pos_ += 4;
          if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
          } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
          } else {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
          }
          break;
        }
        default: fail(std::string("unsupported escape \\") + c);
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    const auto start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  nlohmann::json parse_value() {
    const char c = peek();
    if (c == '"') {
      if (s_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
      return parse_basic_string();
    }
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') return parse_inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  nlohmann::json parse_array() {
    expect('[');
    auto arr = nlohmann::json::array();
    skip_all();
    while (peek() != ']') {
      arr.push_back(parse_value());
      skip_all();
      if (peek() == ',') {
        ++pos_;
        skip_all();
      } else if (peek() != ']') {
        fail("expected ',' or ']' in array");
      }
    }
    ++pos_;
    return arr;
  }

  nlohmann::json parse_inline_table() {
    expect('{');
    auto obj = nlohmann::json::object();
    skip_ws();
    while (peek() != '}') {
      auto path = parse_key_path();
      skip_ws();
      expect('=');
      skip_ws();
      nlohmann::json* target = &obj;
      for (std::size_t i = 0; i + 1 < path.size(); ++i) target = &descend(*target, path[i]);
      (*target)[path.back()] = parse_value();
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        skip_ws();
      } else if (peek() != '}') {
        fail("expected ',' or '}' in inline table");
      }
    }
    ++pos_;
    return obj;
  }

  nlohmann::json parse_number() {
    const auto start = pos_;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                      peek() == '.' || peek() == '_'))
      ++pos_;
    std::string tok;
    for (char ch : s_.substr(start, pos_ - start))
      if (ch != '_') tok.push_back(ch);
    if (tok.empty()) fail("expected a value");
    const std::string body = (tok[0] == '+' || tok[0] == '-') ? tok.substr(1) : tok;
    const double sign = tok[0] == '-' ? -1.0 : 1.0;
    if (body == "inf") return sign * std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    try {
      std::size_t used = 0;
      if (is_float) {
        const double v = std::stod(tok, &used);
        if (used == tok.size()) return v;
      } else {
        const long long v = std::stoll(tok, &used, 10);
        if (used == tok.size()) return v;
      }
    } catch (const std::exception&) {
    }
    fail("invalid value '" + tok + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::json parse(std::string_view text) { return Parser(text).run(); }

nlohmann::json parse_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigError, "cannot read config " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse(text);
}

}  // namespace univrse::toml
