#ifndef LINKSIM_TOML_HPP_
#define LINKSIM_TOML_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "linksim/errors.hpp"

namespace linksim {
namespace toml {

// Minimal TOML reader covering what experiment configs use: [table]
// headers, bare keys, strings, integers, floats (inf allowed), booleans
// and flat arrays. Values are stored under dotted paths ("fec.iterations").
struct Value {
  std::variant<std::string, std::int64_t, double, bool, std::vector<Value>> v;

  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_int() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_float() const { return std::holds_alternative<double>(v); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<std::vector<Value>>(v); }

  // Numeric access: integers promote to double.
  double as_double(const std::string& key) const;
  std::int64_t as_int(const std::string& key) const;
  const std::string& as_string(const std::string& key) const;
  bool as_bool(const std::string& key) const;
};

class Document {
 public:
  static Document parse(const std::string& text);
  static Document parse_file(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& dflt) const;
  std::int64_t get_int(const std::string& key) const;
  std::int64_t get_int(const std::string& key, std::int64_t dflt) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double dflt) const;
  bool get_bool(const std::string& key, bool dflt) const;
  std::vector<double> get_double_array(const std::string& key) const;
  std::vector<std::string> get_string_array(const std::string& key) const;

  const std::map<std::string, Value>& values() const { return values_; }

 private:
  const Value& require(const std::string& key) const;
  std::map<std::string, Value> values_;
};

}  // namespace toml
}  // namespace linksim

#endif  // LINKSIM_TOML_HPP_
