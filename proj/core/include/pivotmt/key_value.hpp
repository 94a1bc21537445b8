#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>

namespace pivotmt {

// Flat `key = value` configuration: one entry per line, '#' starts a
// comment, surrounding whitespace is ignored. Typed getters throw
// ConfigError on malformed values; reject_unknown() throws on keys that were
// never read.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  static KeyValueConfig parse(std::string_view text, std::string_view origin = "config");
  static KeyValueConfig load(const std::string& path);

  bool has(std::string_view key) const;
  void set(std::string key, std::string value);

  std::string get_string(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key, double fallback) const;
  std::int64_t get_int(std::string_view key, std::int64_t fallback) const;
  std::uint64_t get_uint(std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  void reject_unknown() const;
  const std::map<std::string, std::string, std::less<>>& entries() const noexcept { return entries_; }

 private:
  std::string origin_;
  std::map<std::string, std::string, std::less<>> entries_;
  mutable std::set<std::string, std::less<>> read_;
};

}  // namespace pivotmt
