#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nueg::config {

// Sectioned key = value text. '#' and ';' start comments; keys are unique
// per section. Errors carry the line number or the dotted field name.
class Config {
public:
  static Config parse(const std::string& text, const std::string& origin = "<config>");
  static Config load(const std::string& path);

  bool has(const std::string& section, const std::string& key) const;
  bool has_section(const std::string& section) const;

  std::string get(const std::string& section, const std::string& key) const;
  std::string get(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  long long get_int(const std::string& section, const std::string& key) const;
  long long get_int(const std::string& section, const std::string& key, long long fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<int> get_ints(const std::string& section, const std::string& key) const;

  void set(const std::string& section, const std::string& key, const std::string& value);

  // Paths in the file are relative to its directory.
  std::string resolve_path(const std::string& path) const;
  const std::string& origin() const { return origin_; }

  // FNV-1a 64 over the canonical "section.key=value" lines.
  std::uint64_t hash() const;
  std::string hash_hex() const;
  std::string canonical() const;

  const std::map<std::string, std::map<std::string, std::string>>& entries() const { return values_; }

private:
  std::string where(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, std::string>> values_;
  std::map<std::string, int> lines_;  // "section.key" -> line
  std::string origin_;
  std::string base_dir_;
};

std::uint64_t fnv1a64(const std::string& bytes);

} // namespace nueg::config
