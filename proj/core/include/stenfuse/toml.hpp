#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "stenfuse/common.hpp"

namespace stenfuse::toml {

// Minimal TOML reader covering what the problem-spec and machine-profile
// files use: [table] headers, dotted keys, strings, integers, floats,
// booleans, and (nested, possibly multi-line) arrays. Errors carry the
// origin and line number.
struct Value {
  std::variant<bool, std::int64_t, double, std::string, std::vector<Value>> v;
  int line = 0;

  bool is_array() const { return std::holds_alternative<std::vector<Value>>(v); }
  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_number() const {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
  }

  bool as_bool() const;
  std::int64_t as_int() const;
  double as_double() const;  // integers promote
  const std::string& as_string() const;
  const std::vector<Value>& as_array() const;
};

class Table {
 public:
  static Table parse(const std::string& text, const std::string& origin = "");
  static Table parse_file(const std::string& path);

  bool has(const std::string& dotted_key) const { return entries_.count(dotted_key) != 0; }
  const Value* find(const std::string& dotted_key) const;
  const Value& require(const std::string& dotted_key) const;

  bool get_bool(const std::string& key, bool fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  std::vector<std::string> keys() const;
  const std::string& origin() const { return origin_; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const;

 private:
  std::map<std::string, Value> entries_;
  std::string origin_;
};

}  // namespace stenfuse::toml
