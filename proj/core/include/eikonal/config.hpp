#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace eikonal {

/// Raised for malformed config text or values; `key` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key.empty() ? what : key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

/// Plain-text key=value document with [section] headers. Keys are stored
/// qualified as "section.key"; entries before any header have no prefix.
/// '#' and ';' start comments.
class ConfigDoc {
 public:
  static ConfigDoc parse(std::istream& in);
  static ConfigDoc parse_string(const std::string& text);
  static ConfigDoc load(const std::string& path);

  /// "key=value" as given to --set.
  void apply_override(const std::string& assignment);

  void set(const std::string& key, std::string value) { entries_[key] = std::move(value); }
  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  void erase(const std::string& key) { entries_.erase(key); }

  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double_or(const std::string& key, double fallback) const;
  long get_int(const std::string& key) const;
  long get_int_or(const std::string& key, long fallback) const;
  bool get_bool_or(const std::string& key, bool fallback) const;
  /// Comma-separated list.
  std::vector<std::string> get_list_or(const std::string& key,
                                       const std::vector<std::string>& fallback) const;

  /// All qualified keys, sorted.
  std::vector<std::string> keys() const;

  /// Canonical form: sections in sorted order, keys sorted within each.
  std::string serialize() const;

 private:
  std::map<std::string, std::string> entries_;
};

double parse_double(const std::string& key, const std::string& text);
long parse_int(const std::string& key, const std::string& text);
bool parse_bool(const std::string& key, const std::string& text);
std::vector<std::string> split_list(const std::string& text);
/// Shortest round-trip text for a double ("inf" for infinity).
std::string format_double(double v);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(const std::string& text);

}  // namespace eikonal
