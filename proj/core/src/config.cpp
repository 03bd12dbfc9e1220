#include "eikonal/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

namespace eikonal {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

ConfigDoc ConfigDoc::parse(std::istream& in) {
  ConfigDoc doc;
  std::string section;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", "line " + std::to_string(lineno) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("", "line " + std::to_string(lineno) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
    doc.entries_[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return doc;
}

ConfigDoc ConfigDoc::parse_string(const std::string& text) {
  std::istringstream in(text);
  return parse(in);
}

ConfigDoc ConfigDoc::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  return parse(in);
}

void ConfigDoc::apply_override(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw ConfigError(assignment, "override must look like key=value");
  const std::string key = trim(assignment.substr(0, eq));
  if (key.empty()) throw ConfigError(assignment, "empty key in override");
  entries_[key] = trim(assignment.substr(eq + 1));
}

const std::string& ConfigDoc::get(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) throw ConfigError(key, "missing required key");
  return it->second;
}

std::string ConfigDoc::get_or(const std::string& key, const std::string& fallback) const {
  const auto it = entries_.find(key);
  return it == entries_.end() ? fallback : it->second;
}

double ConfigDoc::get_double(const std::string& key) const { return parse_double(key, get(key)); }
double ConfigDoc::get_double_or(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}
long ConfigDoc::get_int(const std::string& key) const { return parse_int(key, get(key)); }
long ConfigDoc::get_int_or(const std::string& key, long fallback) const {
  return has(key) ? get_int(key) : fallback;
}
bool ConfigDoc::get_bool_or(const std::string& key, bool fallback) const {
  return has(key) ? parse_bool(key, get(key)) : fallback;
}

std::vector<std::string> ConfigDoc::get_list_or(const std::string& key,
                                                const std::vector<std::string>& fallback) const {
  return has(key) ? split_list(get(key)) : fallback;
}

std::vector<std::string> ConfigDoc::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

std::string ConfigDoc::serialize() const {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> by_section;
  for (const auto& [k, v] : entries_) {
    const auto dot = k.find('.');
    if (dot == std::string::npos) {
      by_section[""].emplace_back(k, v);
    } else {
      by_section[k.substr(0, dot)].emplace_back(k.substr(dot + 1), v);
    }
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, items] : by_section) {
    if (!section.empty()) {
      if (!first) out << '\n';
      out << '[' << section << "]\n";
    }
    for (const auto& [k, v] : items) out << k << " = " << v << '\n';
    first = false;
  }
  return out.str();
}

double parse_double(const std::string& key, const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "inf" || t == "+inf" || t == "infinity") return std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size() || std::isnan(v)) {
    throw ConfigError(key, "expected a number, got '" + text + "'");
  }
  return v;
}

long parse_int(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc{} || ptr != t.data() + t.size()) {
    throw ConfigError(key, "expected an integer, got '" + text + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& text) {
  const std::string t = lower(trim(text));
  if (t == "1" || t == "true" || t == "yes" || t == "on") return true;
  if (t == "0" || t == "false" || t == "no" || t == "off") return false;
  throw ConfigError(key, "expected a boolean, got '" + text + "'");
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

std::string fnv1a_hex(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace eikonal
