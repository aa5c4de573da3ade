#include "nueg/config.hpp"
#include "nueg/types.hpp"

#include <cerrno>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace nueg::config {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string token;
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '\t') {
      if (!token.empty()) out.push_back(token);
      token.clear();
    } else {
      token += c;
    }
  }
  if (!token.empty()) out.push_back(token);
  return out;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return errno == 0 && end == s.c_str() + s.size();
}

bool parse_int(const std::string& s, long long& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtoll(s.c_str(), &end, 10);
  return errno == 0 && end == s.c_str() + s.size();
}

} // namespace

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto cut = raw.find_first_of("#;");
    const std::string s = trim(cut == std::string::npos ? raw : raw.substr(0, cut));
    if (s.empty()) continue;
    const std::string at = origin + ":" + std::to_string(line) + ": ";
    if (s.front() == '[') {
      if (s.back() != ']') throw ValidationError(at + "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section.empty()) throw ValidationError(at + "empty section name");
      cfg.values_[section];
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ValidationError(at + "expected 'key = value'");
    if (section.empty()) throw ValidationError(at + "key outside any section");
    const std::string key = trim(s.substr(0, eq));
    if (key.empty()) throw ValidationError(at + "empty key");
    auto& sec = cfg.values_[section];
    if (sec.count(key)) throw ValidationError(at + "duplicate key " + section + "." + key);
    sec[key] = trim(s.substr(eq + 1));
    cfg.lines_[section + "." + key] = line;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  Config cfg = parse(buf.str(), path);
  cfg.base_dir_ = std::filesystem::path(path).parent_path().string();
  return cfg;
}

std::string Config::where(const std::string& section, const std::string& key) const {
  auto it = lines_.find(section + "." + key);
  std::string loc = origin_;
  if (it != lines_.end()) loc += ":" + std::to_string(it->second);
  return loc + ": field " + section + "." + key;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = values_.find(section);
  return it != values_.end() && it->second.count(key);
}

bool Config::has_section(const std::string& section) const { return values_.count(section) > 0; }

std::string Config::get(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw ValidationError(origin_ + ": missing field " + section + "." + key);
  return values_.at(section).at(key);
}

std::string Config::get(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? get(section, key) : fallback;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  double v = 0.0;
  if (!parse_double(get(section, key), v)) throw ValidationError(where(section, key) + " is not a number");
  return v;
}

double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}

long long Config::get_int(const std::string& section, const std::string& key) const {
  long long v = 0;
  if (!parse_int(get(section, key), v)) throw ValidationError(where(section, key) + " is not an integer");
  return v;
}

long long Config::get_int(const std::string& section, const std::string& key, long long fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
  std::vector<double> out;
  for (const auto& t : split_list(get(section, key))) {
    double v = 0.0;
    if (!parse_double(t, v)) throw ValidationError(where(section, key) + ": '" + t + "' is not a number");
    out.push_back(v);
  }
  return out;
}

std::vector<int> Config::get_ints(const std::string& section, const std::string& key) const {
  std::vector<int> out;
  for (const auto& t : split_list(get(section, key))) {
    long long v = 0;
    if (!parse_int(t, v)) throw ValidationError(where(section, key) + ": '" + t + "' is not an integer");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  values_[section][key] = value;
}

std::string Config::resolve_path(const std::string& path) const {
  std::filesystem::path p(path);
  if (p.is_absolute() || base_dir_.empty()) return p.string();
  return (std::filesystem::path(base_dir_) / p).string();
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [sec, kv] : values_)
    for (const auto& [k, v] : kv) out += sec + "." + k + "=" + v + "\n";
  return out;
}

std::uint64_t Config::hash() const { return fnv1a64(canonical()); }

std::string Config::hash_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash()));
  return buf;
}

} // namespace nueg::config
