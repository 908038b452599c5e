#include "stenfuse/toml.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

namespace stenfuse::toml {
namespace {

[[noreturn]] void parse_fail(const std::string& origin, int line, const std::string& msg) {
  std::ostringstream os;
  os << (origin.empty() ? "<input>" : origin) << ":" << line << ": " << msg;
  throw config_error(os.str());
}

struct Cursor {
  const std::string& text;
  std::size_t pos = 0;
  int line = 1;
  const std::string& origin;

  bool eof() const { return pos >= text.size(); }
  char peek() const { return text[pos]; }
  char take() {
    const char c = text[pos++];
    if (c == '\n') ++line;
    return c;
  }

  void skip_ws_inline() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos;
  }

  // Whitespace, newlines and comments.
  void skip_ws_all() {
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\r') {
        ++pos;
      } else if (c == '\n') {
        take();
      } else if (c == '#') {
        while (!eof() && peek() != '\n') ++pos;
      } else {
        return;
      }
    }
  }

  [[noreturn]] void fail(const std::string& msg) const { parse_fail(origin, line, msg); }
};

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

std::string parse_basic_string(Cursor& c) {
  std::string out;
  c.take();  // opening quote
  while (true) {
    if (c.eof()) c.fail("unterminated string");
    const char ch = c.take();
    if (ch == '"') break;
    if (ch == '\n') c.fail("newline in string");
    if (ch == '\\') {
      if (c.eof()) c.fail("unterminated escape");
      const char e = c.take();
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        default: c.fail(std::string("unsupported escape \\") + e);
      }
    } else {
      out.push_back(ch);
    }
  }
  return out;
}

Value parse_value(Cursor& c);

Value parse_array(Cursor& c) {
  Value v;
  v.line = c.line;
  std::vector<Value> items;
  c.take();  // '['
  while (true) {
    c.skip_ws_all();
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ']') {
      c.take();
      break;
    }
    items.push_back(parse_value(c));
    c.skip_ws_all();
    if (c.eof()) c.fail("unterminated array");
    if (c.peek() == ',') {
      c.take();
    } else if (c.peek() != ']') {
      c.fail("expected ',' or ']' in array");
    }
  }
  v.v = std::move(items);
  return v;
}

Value parse_scalar(Cursor& c) {
  Value v;
  v.line = c.line;
  std::string tok;
  while (!c.eof()) {
    const char ch = c.peek();
    if (ch == ',' || ch == ']' || ch == '#' || ch == '\n' || ch == ' ' || ch == '\t' ||
        ch == '\r')
      break;
    tok.push_back(c.take());
  }
  if (tok.empty()) c.fail("expected a value");
  if (tok == "true") {
    v.v = true;
    return v;
  }
  if (tok == "false") {
    v.v = false;
    return v;
  }

  {
    std::int64_t iv = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), iv);
    if (ec == std::errc() && p == tok.data() + tok.size()) {
      v.v = iv;
      return v;
    }
  }
  try {
    std::size_t used = 0;
    const double dv = std::stod(tok, &used);
    if (used == tok.size()) {
      v.v = dv;
      return v;
    }
  } catch (...) {
  }
  c.fail("cannot parse value '" + tok + "'");
}

Value parse_value(Cursor& c) {
  c.skip_ws_inline();
  if (c.eof()) c.fail("expected a value");
  const char ch = c.peek();
  if (ch == '"') {
    Value v;
    v.line = c.line;
    v.v = parse_basic_string(c);
    return v;
  }
  if (ch == '[') return parse_array(c);
  return parse_scalar(c);
}

std::string parse_key(Cursor& c) {
  std::string key;
  while (!c.eof() && (is_bare_key_char(c.peek()) || c.peek() == '.')) key.push_back(c.take());
  if (key.empty()) c.fail("expected a key");
  return key;
}

}  // namespace

bool Value::as_bool() const {
  if (!std::holds_alternative<bool>(v)) throw config_error("TOML value is not a boolean");
  return std::get<bool>(v);
}

std::int64_t Value::as_int() const {
  if (!std::holds_alternative<std::int64_t>(v)) throw config_error("TOML value is not an integer");
  return std::get<std::int64_t>(v);
}

double Value::as_double() const {
  if (std::holds_alternative<std::int64_t>(v))
    return static_cast<double>(std::get<std::int64_t>(v));
  if (!std::holds_alternative<double>(v)) throw config_error("TOML value is not a number");
  return std::get<double>(v);
}

const std::string& Value::as_string() const {
  if (!is_string()) throw config_error("TOML value is not a string");
  return std::get<std::string>(v);
}

const std::vector<Value>& Value::as_array() const {
  if (!is_array()) throw config_error("TOML value is not an array");
  return std::get<std::vector<Value>>(v);
}

Table Table::parse(const std::string& text, const std::string& origin) {
  Table t;
  t.origin_ = origin;
  Cursor c{text, 0, 1, t.origin_};
  std::string prefix;

  while (true) {
    c.skip_ws_all();
    if (c.eof()) break;
    if (c.peek() == '[') {
      const int line = c.line;
      c.take();
      c.skip_ws_inline();
      prefix = parse_key(c);
      c.skip_ws_inline();
      if (c.eof() || c.peek() != ']') parse_fail(origin, line, "expected ']' in table header");
      c.take();
      prefix.push_back('.');
      continue;
    }
    const int line = c.line;
    const std::string key = parse_key(c);
    c.skip_ws_inline();
    if (c.eof() || c.peek() != '=') parse_fail(origin, line, "expected '=' after key '" + key + "'");
    c.take();
    Value v = parse_value(c);
    v.line = line;
    const std::string full = prefix + key;
    if (t.entries_.count(full)) parse_fail(origin, line, "duplicate key '" + full + "'");
    t.entries_.emplace(full, std::move(v));
    // Nothing but whitespace/comment may follow on the line.
    c.skip_ws_inline();
    if (!c.eof() && c.peek() != '\n' && c.peek() != '#' && c.peek() != '\r')
      parse_fail(origin, c.line, "unexpected trailing content after value of '" + full + "'");
  }
  return t;
}

Table Table::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

const Value* Table::find(const std::string& key) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

const Value& Table::require(const std::string& key) const {
  const Value* v = find(key);
  if (!v) throw config_error((origin_.empty() ? "<input>" : origin_) + ": missing required key '" +
                             key + "'");
  return *v;
}

bool Table::get_bool(const std::string& key, bool fallback) const {
  const Value* v = find(key);
  return v ? v->as_bool() : fallback;
}

std::int64_t Table::get_int(const std::string& key, std::int64_t fallback) const {
  const Value* v = find(key);
  return v ? v->as_int() : fallback;
}

double Table::get_double(const std::string& key, double fallback) const {
  const Value* v = find(key);
  return v ? v->as_double() : fallback;
}

std::string Table::get_string(const std::string& key, const std::string& fallback) const {
  const Value* v = find(key);
  return v ? v->as_string() : fallback;
}

std::vector<std::string> Table::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

void Table::fail(const std::string& key, const std::string& message) const {
  const Value* v = find(key);
  parse_fail(origin_, v ? v->line : 0, "key '" + key + "': " + message);
}

}  // namespace stenfuse::toml
