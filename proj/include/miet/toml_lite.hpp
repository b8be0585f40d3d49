/*
 * Copyright 2026 The miet Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/**
 * @file toml_lite.hpp
 * @brief The subset of TOML used by scenario files, read into and written
 * from nlohmann::ordered_json.
 *
 * Supported: comments, [table] and [a.b] headers, bare/quoted/dotted keys,
 * basic and literal strings, integers, floats (incl. inf/nan), booleans,
 * nested and multi-line arrays, inline tables. Not supported: arrays of
 * tables, multi-line strings, dates; these are rejected with a line number.
 */

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "miet/error.hpp"

namespace miet::toml {

using json = nlohmann::ordered_json;

struct Document {
  json root = json::object();
  std::map<std::string, int> lines;  // dotted key path -> line of definition
};

namespace detail {

inline bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '-';
}

class Parser {
 public:
  Parser(std::string_view text, std::string source) : s_(text), source_(std::move(source)) {}

  Document parse() {
    json* table = &doc_.root;
    std::string table_path;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (peek() == '[') fail("arrays of tables are not supported");
        skip_ws();
        std::vector<std::string> path = parse_key_path();
        skip_ws();
        expect(']');
        table_path = join(path);
        if (!defined_tables_.insert(table_path).second) fail("table [" + table_path + "] defined twice");
        table = &doc_.root;
        std::string prefix;
        for (const auto& seg : path) {
          prefix = prefix.empty() ? seg : prefix + "." + seg;
          json& next = (*table)[seg];
          if (next.is_null()) {
            next = json::object();
            doc_.lines.emplace(prefix, line_);
          }
          if (!next.is_object()) fail("'" + prefix + "' is not a table");
          table = &next;
        }
        expect_line_end();
        continue;
      }
      parse_key_value(*table, table_path);
      expect_line_end();
    }
    return std::move(doc_);
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::parse, source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  bool eof() const noexcept { return pos_ >= s_.size(); }
  char peek() const noexcept { return eof() ? '\0' : s_[pos_]; }

  void expect(char c) {
    if (peek() != c) fail(std::string("expected '") + c + "'" + (eof() ? " before end of file" : ""));
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (peek() == '#')
      while (!eof() && peek() != '\n') ++pos_;
  }

  void newline() {
    if (peek() == '\r') ++pos_;
    if (peek() == '\n') {
      ++pos_;
      ++line_;
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        break;
      }
    }
  }

  void expect_line_end() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() != '\n' && peek() != '\r') fail(std::string("unexpected '") + peek() + "' after value");
    newline();
  }

  static std::string join(const std::vector<std::string>& path) {
    std::string out;
    for (const auto& p : path) out += out.empty() ? p : "." + p;
    return out;
  }

  std::string parse_simple_key() {
    if (peek() == '"') return parse_basic_string();
    if (peek() == '\'') return parse_literal_string();
    const std::size_t start = pos_;
    while (!eof() && is_bare_key_char(peek())) ++pos_;
    if (start == pos_) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> path{parse_simple_key()};
    skip_ws();
    while (peek() == '.') {
      ++pos_;
      skip_ws();
      path.push_back(parse_simple_key());
      skip_ws();
    }
    return path;
  }

  void parse_key_value(json& table, const std::string& table_path) {
    const int key_line = line_;
    std::vector<std::string> path = parse_key_path();
    skip_ws();
    expect('=');
    skip_ws();
    json* target = &table;
    std::string full = table_path;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      full = full.empty() ? path[i] : full + "." + path[i];
      json& next = (*target)[path[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("'" + full + "' is not a table");
      target = &next;
    }
    full = full.empty() ? path.back() : full + "." + path.back();
    if (target->contains(path.back())) fail("duplicate key '" + full + "'");
    (*target)[path.back()] = parse_value(full);
    doc_.lines.emplace(full, key_line);
  }

  json parse_value(const std::string& path) {
    switch (peek()) {
      case '"':
        if (s_.substr(pos_, 3) == "\"\"\"") fail("multi-line strings are not supported");
        return parse_basic_string();
      case '\'':
        if (s_.substr(pos_, 3) == "'''") fail("multi-line strings are not supported");
        return parse_literal_string();
      case '[': return parse_array(path);
      case '{': return parse_inline_table(path);
      case '\0': fail("missing value");
      default: break;
    }
    if (s_.substr(pos_, 4) == "true" && !is_bare_key_char(at(pos_ + 4))) {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false" && !is_bare_key_char(at(pos_ + 5))) {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  char at(std::size_t i) const noexcept { return i < s_.size() ? s_[i] : '\0'; }

  std::string parse_basic_string() {
    expect('"');
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      char c = s_[pos_++];
      if (c == '"') break;
      if (c != '\\') {
        out += c;
        continue;
      }
      if (eof()) fail("unterminated escape");
      switch (char esc = s_[pos_++]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'b': out += '\b'; break;
        case 'f': out += '\f'; break;
        default: fail(std::string("unsupported escape \\") + esc);
      }
    }
    return out;
  }

  std::string parse_literal_string() {
    expect('\'');
    const std::size_t start = pos_;
    while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
    if (peek() != '\'') fail("unterminated literal string");
    std::string out(s_.substr(start, pos_ - start));
    ++pos_;
    return out;
  }

  void skip_array_space() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\n' || peek() == '\r') {
        newline();
      } else {
        break;
      }
    }
  }

  json parse_array(const std::string& path) {
    expect('[');
    json arr = json::array();
    while (true) {
      skip_array_space();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        break;
      }
      arr.push_back(parse_value(path));
      skip_array_space();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() == ']') {
        ++pos_;
        break;
      } else {
        fail("expected ',' or ']' in array");
      }
    }
    return arr;
  }

  json parse_inline_table(const std::string& path) {
    expect('{');
    json tbl = json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return tbl;
    }
    while (true) {
      skip_ws();
      parse_key_value(tbl, path);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
      } else if (peek() == '}') {
        ++pos_;
        break;
      } else {
        fail("expected ',' or '}' in inline table");
      }
    }
    return tbl;
  }

  json parse_number() {
    const std::size_t start = pos_;
    while (!eof() && (is_bare_key_char(peek()) || peek() == '.' || peek() == '+')) ++pos_;
    std::string tok(s_.substr(start, pos_ - start));
    if (tok.empty()) fail(std::string("unexpected '") + peek() + "'");
    std::string clean;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '_') {
        if (i == 0 || i + 1 == tok.size() || !std::isdigit(static_cast<unsigned char>(tok[i - 1])) ||
            !std::isdigit(static_cast<unsigned char>(tok[i + 1]))) {
          fail("misplaced '_' in number '" + tok + "'");
        }
        continue;
      }
      clean += tok[i];
    }
    std::string body = clean;
    if (!body.empty() && (body[0] == '+' || body[0] == '-')) body.erase(0, 1);
    if (body == "inf") return clean[0] == '-' ? -INFINITY : INFINITY;
    if (body == "nan") return NAN;
    if (body.size() > 1 && body[0] == '0' && std::isalpha(static_cast<unsigned char>(body[1]))) {
      fail("only decimal numbers are supported, got '" + tok + "'");
    }
    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    char* end = nullptr;
    if (is_float) {
      const double v = std::strtod(clean.c_str(), &end);
      if (end != clean.c_str() + clean.size()) fail("invalid number '" + tok + "'");
      return v;
    }
    const long long v = std::strtoll(clean.c_str(), &end, 10);
    if (end != clean.c_str() + clean.size() || clean.empty()) fail("invalid value '" + tok + "'");
    return v;
  }

  std::string_view s_;
  std::string source_;
  std::size_t pos_ = 0;
  int line_ = 1;
  Document doc_;
  std::set<std::string> defined_tables_;
};

inline std::string format_key(const std::string& k) {
  bool bare = !k.empty();
  for (char c : k) bare = bare && is_bare_key_char(c);
  return bare ? k : json(k).dump();
}

inline std::string format_scalar(const json& v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d < 0 ? "-inf" : "inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    std::string s(buf);
    if (s.find_first_of(".eE") == std::string::npos) s += ".0";
    return s;
  }
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) return v.dump();
  if (v.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_scalar(v[i]);
    return out + "]";
  }
  if (v.is_object()) {
    std::string out = "{";
    bool first = true;
    for (const auto& [k, item] : v.items()) {
      out += (first ? "" : ", ") + format_key(k) + " = " + format_scalar(item);
      first = false;
    }
    return out + "}";
  }
  throw Error(Errc::unsupported, "null values cannot be written as TOML");
}

inline void dump_table(std::string& out, const json& tbl, const std::string& path) {
  for (const auto& [k, v] : tbl.items())
    if (!v.is_object()) out += format_key(k) + " = " + format_scalar(v) + "\n";
  for (const auto& [k, v] : tbl.items()) {
    if (!v.is_object()) continue;
    const std::string sub = path.empty() ? format_key(k) : path + "." + format_key(k);
    out += "\n[" + sub + "]\n";
    dump_table(out, v, sub);
  }
}

}  // namespace detail

inline Document parse(std::string_view text, const std::string& source = "<string>") {
  return detail::Parser(text, source).parse();
}

/// Scalars first, then every object as its own [table] section.
inline std::string dump(const json& root) {
  std::string out;
  detail::dump_table(out, root, "");
  return out;
}

}  // namespace miet::toml
