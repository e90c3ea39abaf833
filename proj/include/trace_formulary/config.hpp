#pragma once

#include <charconv>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "trace_formulary/error.hpp"

namespace trace_formulary {

/// Structured text config: `key = value` lines grouped under optional
/// `[section]` headers, `#` comments. Values are kept verbatim (trimmed, one
/// pair of surrounding double quotes removed), so matrix rows such as
/// `2,1;1,1` survive unchanged.
class ConfigDocument {
 public:
  using Section = std::map<std::string, std::string>;

  static ConfigDocument parse(std::string_view text) {
    ConfigDocument doc;
    std::string current;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string t = trim(line);
      if (t.empty() || t.front() == '#' || t.front() == ';') continue;
      if (t.front() == '[') {
        require(t.back() == ']', ErrorKind::InvalidInput, "config line " + std::to_string(lineno) + ": unterminated section header");
        current = trim(t.substr(1, t.size() - 2));
        doc.sections_[current];
        continue;
      }
      const auto eq = t.find('=');
      require(eq != std::string::npos, ErrorKind::InvalidInput, "config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
      require(!key.empty(), ErrorKind::InvalidInput, "config line " + std::to_string(lineno) + ": empty key");
      doc.sections_[current][key] = value;
    }
    return doc;
  }

  bool has_section(const std::string& name) const { return sections_.count(name) > 0; }

  const Section& section(const std::string& name) const {
    static const Section empty;
    auto it = sections_.find(name);
    return it == sections_.end() ? empty : it->second;
  }

  std::optional<std::string> get(const std::string& section_name, const std::string& key) const {
    const auto& s = section(section_name);
    auto it = s.find(key);
    if (it == s.end()) return std::nullopt;
    return it->second;
  }

  void set(const std::string& section_name, const std::string& key, std::string value) {
    sections_[section_name][key] = std::move(value);
  }

  /// Serializes sections in name order, top-level keys first.
  std::string to_text() const {
    std::string out;
    for (const auto& [name, entries] : sections_) {
      if (!name.empty()) out += "[" + name + "]\n";
      for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
    }
    return out;
  }

  static std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
  }

 private:
  std::map<std::string, Section> sections_;
};

/// Shortest decimal text that reads back to the same double (at most 17 significant digits).
inline std::string format_decimal(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

inline double parse_double(std::string_view text, const std::string& what) {
  const std::string t = ConfigDocument::trim(text);
  double value = 0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && t.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  require(ec == std::errc() && ptr == last && !t.empty(), ErrorKind::InvalidInput, what + ": not a decimal number: '" + t + "'");
  return value;
}

inline long parse_long(std::string_view text, const std::string& what) {
  const std::string t = ConfigDocument::trim(text);
  long value = 0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && t.front() == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, value);
  require(ec == std::errc() && ptr == last && !t.empty(), ErrorKind::InvalidInput, what + ": not an integer: '" + t + "'");
  return value;
}

inline std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    parts.push_back(ConfigDocument::trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

}  // namespace trace_formulary
