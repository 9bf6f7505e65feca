#include "fbl/toml.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "fbl/error.hpp"

namespace fbl {
namespace {

using json = nlohmann::ordered_json;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  json document() {
    json root = json::object();
    json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        if (peek(1) == '[') fail("arrays of tables are not supported");
        ++pos_;
        skip_ws();
        const auto path = key_path();
        skip_ws();
        expect(']');
        end_of_line();
        table = &root;
        for (const auto& k : path) {
          auto& next = (*table)[k];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("key '" + k + "' is not a table");
          table = &next;
        }
        continue;
      }
      assign(*table);
      end_of_line();
    }
    return root;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < s_.size(); ++i) {
      if (s_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << what;
    throw Error(Errc::config_error, os.str());
  }

  [[nodiscard]] bool eof() const { return pos_ >= s_.size(); }
  [[nodiscard]] char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0';
  }
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
    for (;;) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') ++pos_;
      if (peek() == '\n') {
        ++pos_;
        continue;
      }
      return;
    }
  }
  // whitespace, comments and newlines inside arrays
  void skip_all() { skip_blank_lines(); }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected text after value");
    ++pos_;
  }

  std::string key() {
    if (peek() == '"') return basic_string();
    std::string k;
    while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) k += s_[pos_++];
    if (k.empty()) fail("expected a key");
    return k;
  }

  std::vector<std::string> key_path() {
    std::vector<std::string> path{key()};
    for (;;) {
      skip_ws();
      if (peek() != '.') return path;
      ++pos_;
      skip_ws();
      path.push_back(key());
    }
  }

  void assign(json& table) {
    const auto path = key_path();
    skip_ws();
    expect('=');
    skip_ws();
    json* target = &table;
    for (std::size_t i = 0; i + 1 < path.size(); ++i) {
      auto& next = (*target)[path[i]];
      if (next.is_null()) next = json::object();
      if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
      target = &next;
    }
    if (target->contains(path.back())) fail("duplicate key '" + path.back() + "'");
    (*target)[path.back()] = value();
  }

  json value() {
    const char c = peek();
    if (c == '"') return basic_string();
    if (c == '\'') return literal_string();
    if (c == '[') return array();
    if (c == '{') return inline_table();
    if (s_.substr(pos_, 4) == "true") {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false") {
      pos_ += 5;
      return false;
    }
    return number();
  }

  std::string basic_string() {
    expect('"');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '"') return out;
      if (c != '\\') {
        out += c;
        continue;
      }
      const char e = s_[pos_++];
      switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        default: fail(std::string("unsupported escape \\") + e);
      }
    }
  }

  std::string literal_string() {
    expect('\'');
    std::string out;
    for (;;) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = s_[pos_++];
      if (c == '\'') return out;
      out += c;
    }
  }

  json array() {
    expect('[');
    json arr = json::array();
    for (;;) {
      skip_all();
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(value());
      skip_all();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      skip_all();
      expect(']');
      return arr;
    }
  }

  json inline_table() {
    expect('{');
    json t = json::object();
    skip_ws();
    if (peek() == '}') {
      ++pos_;
      return t;
    }
    for (;;) {
      skip_ws();
      assign(t);
      skip_ws();
      if (peek() == ',') {
        ++pos_;
        continue;
      }
      expect('}');
      return t;
    }
  }

  json number() {
    const std::size_t start = pos_;
    std::string tok;
    while (!eof()) {
      const char c = peek();
      if (std::isalnum(static_cast<unsigned char>(c)) || c == '+' || c == '-' || c == '.' || c == '_') {
        if (c != '_') tok += c;
        ++pos_;
      } else {
        break;
      }
    }
    if (tok.empty()) fail("expected a value");
    std::string body = tok;
    double sign = 1.0;
    if (body[0] == '+' || body[0] == '-') {
      sign = body[0] == '-' ? -1.0 : 1.0;
      body = body.substr(1);
    }
    if (body == "inf") return sign * std::numeric_limits<double>::infinity();
    if (body == "nan") return std::numeric_limits<double>::quiet_NaN();
    const bool is_float = tok.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const auto* first = tok.data() + (tok[0] == '+' ? 1 : 0);
      const auto r = std::from_chars(first, tok.data() + tok.size(), v);
      if (r.ec != std::errc() || r.ptr != tok.data() + tok.size()) {
        pos_ = start;
        fail("invalid integer '" + tok + "'");
      }
      return v;
    }
    std::istringstream is(tok);
    is.imbue(std::locale::classic());
    double d = 0.0;
    is >> d;
    if (is.fail() || !is.eof()) {
      pos_ = start;
      fail("invalid number '" + tok + "'");
    }
    return d;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

nlohmann::ordered_json parse_toml(std::string_view text) { return Parser(text).document(); }

}  // namespace fbl
