#include "run_manifest.hpp"

#include <filesystem>
#include <fstream>

#include "pivotmt/error.hpp"
#include "pivotmt/hashing.hpp"
#include "pivotmt/version.hpp"

namespace fs = std::filesystem;

namespace pivotmt::cli {

RunManifest::RunManifest(std::string command) : command_(std::move(command)) {}

void RunManifest::set(const std::string& key, const std::string& value) { fields_.emplace_back(key, value); }

void RunManifest::config(const KeyValueConfig& kv) {
  for (const auto& [k, v] : kv.entries()) config_.emplace_back(k, v);
}

void RunManifest::input(const std::string& path) {
  std::string digest = "-";
  if (fs::is_regular_file(path)) digest = hex64(hash_file(path));
  inputs_.emplace_back(path, digest);
}

void RunManifest::artifact(const std::string& path) { artifacts_.emplace_back(path, hex64(hash_file(path))); }

std::string RunManifest::write(const std::string& dir) const {
  fs::create_directories(dir);
  const std::string path = (fs::path(dir) / "run_manifest.txt").string();
  std::ofstream out(path, std::ios::binary);
  out << "tool: pivotmt " << kVersion << '\n';
  out << "command: " << command_ << '\n';
  for (const auto& [k, v] : fields_) out << k << ": " << v << '\n';
  for (const auto& [k, v] : config_) out << "config." << k << ": " << v << '\n';
  for (const auto& [p, h] : inputs_) out << "input: " << p << ' ' << h << '\n';
  // artifacts are listed relative to the manifest so the file does not depend on --out
  for (const auto& [p, h] : artifacts_) {
    out << "artifact: " << fs::path(p).lexically_relative(dir).generic_string() << ' ' << h << '\n';
  }
  if (!out) throw FormatError("cannot write " + path);
  return path;
}

}  // namespace pivotmt::cli
