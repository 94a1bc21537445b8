#include "pivotmt/key_value.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "pivotmt/error.hpp"

namespace pivotmt {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::string_view text, std::string_view origin) {
  KeyValueConfig cfg;
  cfg.origin_ = std::string(origin);
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(cfg.origin_ + ":" + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key.empty()) throw ConfigError(cfg.origin_ + ":" + std::to_string(line_no) + ": empty key");
    if (cfg.entries_.count(key)) {
      throw ConfigError(cfg.origin_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    cfg.entries_.emplace(key, value);
  }
  return cfg;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

bool KeyValueConfig::has(std::string_view key) const { return entries_.find(key) != entries_.end(); }

void KeyValueConfig::set(std::string key, std::string value) { entries_[std::move(key)] = std::move(value); }

std::string KeyValueConfig::get_string(std::string_view key, std::string fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_.insert(std::string(key));
  return it->second;
}

double KeyValueConfig::get_double(std::string_view key, double fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_.insert(std::string(key));
  const std::string& s = it->second;
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(origin_ + ": key '" + std::string(key) + "' expects a number, got '" + s + "'");
  }
  return v;
}

std::int64_t KeyValueConfig::get_int(std::string_view key, std::int64_t fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_.insert(std::string(key));
  const std::string& s = it->second;
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ConfigError(origin_ + ": key '" + std::string(key) + "' expects an integer, got '" + s + "'");
  }
  return v;
}

std::uint64_t KeyValueConfig::get_uint(std::string_view key, std::uint64_t fallback) const {
  const std::int64_t v = get_int(key, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError(origin_ + ": key '" + std::string(key) + "' must be non-negative");
  return static_cast<std::uint64_t>(v);
}

bool KeyValueConfig::get_bool(std::string_view key, bool fallback) const {
  auto it = entries_.find(key);
  if (it == entries_.end()) return fallback;
  read_.insert(std::string(key));
  const std::string& s = it->second;
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError(origin_ + ": key '" + std::string(key) + "' expects true/false, got '" + s + "'");
}

void KeyValueConfig::reject_unknown() const {
  for (const auto& [key, value] : entries_) {
    if (!read_.count(key)) throw ConfigError(origin_ + ": unknown key '" + key + "'");
  }
}

}  // namespace pivotmt
