#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pivotmt/key_value.hpp"

namespace pivotmt::cli {

// Record of one command run: resolved config, seed, input hashes and the
// artifacts it produced. Written as `run_manifest.txt` next to the artifacts.
class RunManifest {
 public:
  explicit RunManifest(std::string command);

  void set(const std::string& key, const std::string& value);
  void config(const KeyValueConfig& kv);
  void input(const std::string& path);
  void artifact(const std::string& path);

  // Returns the manifest path.
  std::string write(const std::string& dir) const;

 private:
  std::string command_;
  std::vector<std::pair<std::string, std::string>> fields_;
  std::vector<std::pair<std::string, std::string>> config_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::pair<std::string, std::string>> artifacts_;
};

}  // namespace pivotmt::cli
