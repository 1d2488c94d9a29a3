#include "linksim/toml.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace linksim {
namespace toml {
namespace {

[[noreturn]] void fail(std::size_t line, const std::string& msg) {
  std::ostringstream os;
  os << "config parse error, line " << line << ": " << msg;
  throw ConfigError(os.str());
}

std::string strip(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Removes a trailing comment, honoring quoted strings.
std::string strip_comment(const std::string& s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool valid_key(const std::string& k) {
  if (k.empty()) return false;
  for (char c : k)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-') return false;
  return true;
}

class Cursor {
 public:
  Cursor(const std::string& s, std::size_t line) : s_(s), line_(line) {}

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t')) ++pos_;
  }
  bool done() {
    skip_ws();
    return pos_ >= s_.size();
  }
  char peek() { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  char take() { return s_[pos_++]; }

  Value parse_value() {
    skip_ws();
    if (done()) fail(line_, "expected a value");
    char c = peek();
    if (c == '"') return parse_string();
    if (c == '[') return parse_array();
    return parse_scalar();
  }

  std::size_t line() const { return line_; }

 private:
  Value parse_string() {
    take();  // opening quote
    std::string out;
    while (pos_ < s_.size()) {
      char c = take();
      if (c == '\\') {
        if (pos_ >= s_.size()) fail(line_, "dangling escape in string");
        char e = take();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          default: fail(line_, std::string("unsupported escape \\") + e);
        }
      } else if (c == '"') {
        return Value{out};
      } else {
        out.push_back(c);
      }
    }
    fail(line_, "unterminated string");
  }

  Value parse_array() {
    take();  // '['
    std::vector<Value> items;
    skip_ws();
    if (peek() == ']') {
      take();
      return Value{items};
    }
    while (true) {
      items.push_back(parse_value());
      skip_ws();
      char c = peek();
      if (c == ',') {
        take();
        skip_ws();
        if (peek() == ']') {  // trailing comma
          take();
          return Value{items};
        }
        continue;
      }
      if (c == ']') {
        take();
        return Value{items};
      }
      fail(line_, "expected ',' or ']' in array");
    }
  }

  Value parse_scalar() {
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != ']') ++pos_;
    std::string tok = strip(s_.substr(start, pos_ - start));
    if (tok.empty()) fail(line_, "empty value");
    if (tok == "true") return Value{true};
    if (tok == "false") return Value{false};
    if (tok == "inf" || tok == "+inf") return Value{std::numeric_limits<double>::infinity()};
    if (tok == "-inf") return Value{-std::numeric_limits<double>::infinity()};
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos &&
                             tok.find_first_not_of("+-0123456789.eE") == std::string::npos;
    char* end = nullptr;
    if (!looks_float) {
      long long i = std::strtoll(tok.c_str(), &end, 10);
      if (end && *end == '\0') return Value{static_cast<std::int64_t>(i)};
    }
    double d = std::strtod(tok.c_str(), &end);
    if (end && *end == '\0') return Value{d};
    fail(line_, "cannot parse value '" + tok + "'");
  }

  const std::string& s_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace

double Value::as_double(const std::string& key) const {
  if (is_float()) return std::get<double>(v);
  if (is_int()) return static_cast<double>(std::get<std::int64_t>(v));
  throw ConfigError("field '" + key + "': expected a number");
}

std::int64_t Value::as_int(const std::string& key) const {
  if (is_int()) return std::get<std::int64_t>(v);
  throw ConfigError("field '" + key + "': expected an integer");
}

const std::string& Value::as_string(const std::string& key) const {
  if (is_string()) return std::get<std::string>(v);
  throw ConfigError("field '" + key + "': expected a string");
}

bool Value::as_bool(const std::string& key) const {
  if (is_bool()) return std::get<bool>(v);
  throw ConfigError("field '" + key + "': expected true or false");
}

Document Document::parse(const std::string& text) {
  Document doc;
  std::istringstream in(text);
  std::string raw;
  std::string prefix;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = strip(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.size() < 3 || line.back() != ']') fail(lineno, "malformed table header");
      if (line[1] == '[') fail(lineno, "arrays of tables are not supported");
      std::string name = strip(line.substr(1, line.size() - 2));
      for (const char c : name)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.'))
          fail(lineno, "malformed table name '" + name + "'");
      if (name.empty()) fail(lineno, "empty table name");
      prefix = name + ".";
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
    std::string key = strip(line.substr(0, eq));
    if (!valid_key(key)) fail(lineno, "malformed key '" + key + "'");
    std::string rhs = strip(line.substr(eq + 1));
    Cursor cur(rhs, lineno);
    Value val = cur.parse_value();
    if (!cur.done()) fail(lineno, "trailing characters after value");
    std::string full = prefix + key;
    if (doc.values_.count(full)) fail(lineno, "duplicate key '" + full + "'");
    doc.values_.emplace(std::move(full), std::move(val));
  }
  return doc;
}

Document Document::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const Value& Document::require(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("field '" + key + "': missing");
  return it->second;
}

std::string Document::get_string(const std::string& key) const {
  return require(key).as_string(key);
}
std::string Document::get_string(const std::string& key, const std::string& dflt) const {
  return has(key) ? get_string(key) : dflt;
}
std::int64_t Document::get_int(const std::string& key) const {
  return require(key).as_int(key);
}
std::int64_t Document::get_int(const std::string& key, std::int64_t dflt) const {
  return has(key) ? get_int(key) : dflt;
}
double Document::get_double(const std::string& key) const {
  return require(key).as_double(key);
}
double Document::get_double(const std::string& key, double dflt) const {
  return has(key) ? get_double(key) : dflt;
}
bool Document::get_bool(const std::string& key, bool dflt) const {
  return has(key) ? require(key).as_bool(key) : dflt;
}

std::vector<double> Document::get_double_array(const std::string& key) const {
  const Value& v = require(key);
  if (!v.is_array()) throw ConfigError("field '" + key + "': expected an array");
  std::vector<double> out;
  for (const Value& e : std::get<std::vector<Value>>(v.v)) out.push_back(e.as_double(key));
  return out;
}

std::vector<std::string> Document::get_string_array(const std::string& key) const {
  const Value& v = require(key);
  if (!v.is_array()) throw ConfigError("field '" + key + "': expected an array");
  std::vector<std::string> out;
  for (const Value& e : std::get<std::vector<Value>>(v.v)) out.push_back(e.as_string(key));
  return out;
}

}  // namespace toml
}  // namespace linksim
