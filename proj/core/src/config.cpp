#include "lcqft/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lcqft {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

Config Config::parse_text(const std::string& text) {
  Config cfg;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  Section* cur = nullptr;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("unterminated section header", line_no);
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError("empty section name", line_no);
      cfg.sections_.push_back({name, line_no, {}});
      cur = &cfg.sections_.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected `key = value` or `[section]`", line_no);
    if (!cur) throw ConfigError("key outside any section", line_no);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError("empty key", line_no);
    for (const auto& e : cur->entries)
      if (e.key == key) throw ConfigError("duplicate key `" + key + "`", line_no);
    cur->entries.push_back({key, value, line_no});
  }
  return cfg;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file: " + path, 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

const Config::Entry* Config::find(const std::string& section,
                                  const std::string& key) const {
  for (const auto& s : sections_)
    if (s.name == section)
      for (const auto& e : s.entries)
        if (e.key == key) return &e;
  return nullptr;
}

bool Config::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

std::string Config::get(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing key `" + key + "` in section [" + section + "]", 0);
  return e->value;
}

std::string Config::get_or(const std::string& section, const std::string& key,
                           const std::string& fallback) const {
  const Entry* e = find(section, key);
  return e ? e->value : fallback;
}

namespace {

double to_double(const std::string& v, int line) {
  char* end = nullptr;
  const double r = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    throw ConfigError("expected a number, got `" + v + "`", line);
  return r;
}

}  // namespace

double Config::get_double(const std::string& section, const std::string& key) const {
  const Entry* e = find(section, key);
  if (!e) throw ConfigError("missing key `" + key + "` in section [" + section + "]", 0);
  return to_double(e->value, e->line);
}

double Config::get_double_or(const std::string& section, const std::string& key,
                             double fallback) const {
  const Entry* e = find(section, key);
  return e ? to_double(e->value, e->line) : fallback;
}

int Config::get_int(const std::string& section, const std::string& key) const {
  const double d = get_double(section, key);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("expected an integer for `" + key + "`", find(section, key)->line);
  return i;
}

int Config::get_int_or(const std::string& section, const std::string& key,
                       int fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

void Config::set(const std::string& section, const std::string& key,
                 const std::string& value) {
  for (auto& s : sections_)
    if (s.name == section) {
      for (auto& e : s.entries)
        if (e.key == key) {
          e.value = value;
          return;
        }
      s.entries.push_back({key, value, 0});
      return;
    }
  sections_.push_back({section, 0, {{key, value, 0}}});
}

void Config::validate(
    const std::map<std::string, std::set<std::string>>& allowed) const {
  for (const auto& s : sections_) {
    const auto it = allowed.find(s.name);
    if (it == allowed.end())
      throw ConfigError("unknown section [" + s.name + "]", s.line);
    for (const auto& e : s.entries)
      if (!it->second.count(e.key))
        throw ConfigError("unknown key `" + e.key + "` in section [" + s.name + "]",
                          e.line);
  }
}

std::string Config::to_text() const {
  std::ostringstream out;
  for (const auto& s : sections_) {
    out << "[" << s.name << "]\n";
    for (const auto& e : s.entries) out << e.key << " = " << e.value << "\n";
    out << "\n";
  }
  return out.str();
}

}  // namespace lcqft
