#pragma once

#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace lcqft {

// Parse or lookup failure; `line` is 1-based (0 when not tied to a line).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, int line_no)
      : std::runtime_error(line_no > 0 ? msg + " (line " + std::to_string(line_no) + ")"
                                       : msg),
        line(line_no) {}
  int line = 0;
};

// Plain-text configuration: `[section]` headers and `key = value` lines, one
// level deep, `#` comments. Order-preserving, round-trip stable.
class Config {
 public:
  static Config parse_text(const std::string& text);
  static Config parse_file(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key) const;
  std::string get_or(const std::string& section, const std::string& key,
                     const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double_or(const std::string& section, const std::string& key,
                       double fallback) const;
  int get_int(const std::string& section, const std::string& key) const;
  int get_int_or(const std::string& section, const std::string& key,
                 int fallback) const;

  void set(const std::string& section, const std::string& key,
           const std::string& value);

  // Rejects sections/keys not in the allowed map; throws ConfigError with the
  // offending line number.
  void validate(const std::map<std::string, std::set<std::string>>& allowed) const;

  std::string to_text() const;

  struct Entry {
    std::string key, value;
    int line = 0;
  };
  struct Section {
    std::string name;
    int line = 0;
    std::vector<Entry> entries;
  };
  const std::vector<Section>& sections() const { return sections_; }

 private:
  const Entry* find(const std::string& section, const std::string& key) const;
  std::vector<Section> sections_;
};

}  // namespace lcqft
