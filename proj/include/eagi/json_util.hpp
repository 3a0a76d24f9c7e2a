#pragma once

// Small helpers over nlohmann::json: path-qualified schema errors, typed
// member access, a JSON-pointer to source-line index, and number formatting.

#include <charconv>
#include <cmath>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include <json.hpp>

namespace eagi {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Raised by every from_json in this library. `path` is a JSON pointer into
// the document being decoded.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& what)
      : std::runtime_error((path.empty() ? std::string("/") : path) + ": " + what), path_(std::move(path)) {}

  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

inline std::string pointer_escape(std::string_view token) {
  std::string out;
  for (char c : token) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out.push_back(c);
  }
  return out;
}

// A view of one JSON node plus its pointer, for error reporting.
class Node {
 public:
  Node(const json& j, std::string path) : j_(&j), path_(std::move(path)) {}

  const json& raw() const { return *j_; }
  const std::string& path() const { return path_; }

  [[noreturn]] void fail(const std::string& what) const { throw SchemaError(path_, what); }

  Node at(std::string_view key) const {
    expect_object();
    auto it = j_->find(std::string(key));
    if (it == j_->end()) fail("missing required field '" + std::string(key) + "'");
    return Node(*it, path_ + "/" + pointer_escape(key));
  }

  std::optional<Node> find(std::string_view key) const {
    expect_object();
    auto it = j_->find(std::string(key));
    if (it == j_->end() || it->is_null()) return std::nullopt;
    return Node(*it, path_ + "/" + pointer_escape(key));
  }

  bool has(std::string_view key) const { return j_->is_object() && j_->contains(std::string(key)); }

  Node operator[](std::size_t i) const { return Node((*j_)[i], path_ + "/" + std::to_string(i)); }

  std::vector<Node> items() const {
    if (!j_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_->size(); ++i) out.push_back((*this)[i]);
    return out;
  }

  std::vector<std::pair<std::string, Node>> members() const {
    expect_object();
    std::vector<std::pair<std::string, Node>> out;
    for (auto it = j_->begin(); it != j_->end(); ++it)
      out.emplace_back(it.key(), Node(it.value(), path_ + "/" + pointer_escape(it.key())));
    return out;
  }

  void expect_object() const {
    if (!j_->is_object()) fail("expected an object");
  }

  // Rejects members outside `allowed`; misspelled keys fail loudly.
  void only(std::initializer_list<std::string_view> allowed) const {
    expect_object();
    for (auto it = j_->begin(); it != j_->end(); ++it) {
      bool ok = false;
      for (auto a : allowed)
        if (it.key() == a) ok = true;
      if (!ok) Node(it.value(), path_ + "/" + pointer_escape(it.key())).fail("unknown field '" + it.key() + "'");
    }
  }

  std::string str() const {
    if (!j_->is_string()) fail("expected a string");
    return j_->get<std::string>();
  }

  double num() const {
    if (!j_->is_number()) fail("expected a number");
    const double v = j_->get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  int integer() const {
    if (!j_->is_number_integer()) {
      if (j_->is_number_float()) {
        const double v = j_->get<double>();
        if (std::floor(v) == v && std::abs(v) < 1e9) return static_cast<int>(v);
      }
      fail("expected an integer");
    }
    return j_->get<int>();
  }

  bool boolean() const {
    if (!j_->is_boolean()) fail("expected a boolean");
    return j_->get<bool>();
  }

  std::vector<std::string> strings() const {
    std::vector<std::string> out;
    for (const auto& n : items()) out.push_back(n.str());
    return out;
  }

 private:
  const json* j_;
  std::string path_;
};

// Maps JSON pointers to the 1-based line on which each value starts. Assumes
// the text has already been accepted by a conforming parser.
class LineIndex {
 public:
  explicit LineIndex(std::string_view text) : text_(text) {
    value("");
    text_ = {};
  }

  // Line of `pointer`, or of its nearest ancestor present in the source.
  int line_of(std::string pointer) const {
    while (true) {
      if (auto it = lines_.find(pointer); it != lines_.end()) return it->second;
      const auto slash = pointer.rfind('/');
      if (slash == std::string::npos) return 1;
      pointer.resize(slash);
    }
  }

  // 1-based line containing byte offset `pos`.
  static int line_at(std::string_view text, std::size_t pos) {
    int line = 1;
    for (std::size_t i = 0; i < pos && i < text.size(); ++i)
      if (text[i] == '\n') ++line;
    return line;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '\n') ++line_;
      else if (c != ' ' && c != '\t' && c != '\r') break;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') {
        ++pos_;
        if (pos_ < text_.size()) {
          // Escapes never appear in the keys this index is queried with, so
          // only the escaped character itself is kept.
          out.push_back(text_[pos_]);
        }
      } else {
        out.push_back(text_[pos_]);
      }
      ++pos_;
    }
    ++pos_;  // closing quote
    return out;
  }

  void value(const std::string& pointer) {
    skip_ws();
    if (pos_ >= text_.size()) return;
    lines_.emplace(pointer, line_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == '}') { ++pos_; return; }
      while (pos_ < text_.size()) {
        skip_ws();
        const std::string key = string_token();
        skip_ws();
        ++pos_;  // colon
        value(pointer + "/" + pointer_escape(key));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') { ++pos_; continue; }
        ++pos_;  // closing brace
        return;
      }
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      if (pos_ < text_.size() && text_[pos_] == ']') { ++pos_; return; }
      for (std::size_t i = 0; pos_ < text_.size(); ++i) {
        value(pointer + "/" + std::to_string(i));
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == ',') { ++pos_; continue; }
        ++pos_;
        return;
      }
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && text_[pos_] != ',' && text_[pos_] != '}' && text_[pos_] != ']' &&
             text_[pos_] != '\n' && text_[pos_] != ' ' && text_[pos_] != '\t' && text_[pos_] != '\r')
        ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

// Shortest decimal form that round-trips ("22.2", "8436", "0.0316").
inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return std::to_string(v);
  return std::string(buf, end);
}

// Fixed significant digits for human-facing text: 4 -> "0.02513", "8436".
inline std::string format_sig(double v, int digits = 4) {
  if (v == 0.0 || !std::isfinite(v)) return format_number(v);
  const int magnitude = static_cast<int>(std::floor(std::log10(std::abs(v))));
  const int decimals = std::max(0, digits - 1 - magnitude);
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  if (ec != std::errc{}) return format_number(v);
  std::string s(buf, end);
  if (s.find('.') != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  return s;
}

}  // namespace eagi
