#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace pivotmt {

// Row-major matrix of 32-bit image features; `count` may be zero.
struct FeatureMatrix {
  std::size_t count = 0;
  std::size_t dim = 0;
  std::vector<float> values;

  std::span<const float> row(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

struct FeatureFile {
  FeatureMatrix matrix;
  std::vector<std::string> ids;  // row index as text, "0", "1", ...
};

// Format: first line "<count> <dim>", then `count` lines of `dim`
// space-separated decimals. Throws FormatError on header/row mismatch or
// non-finite values.
FeatureFile load_features(const std::string& path);
void save_features(const std::string& path, const FeatureMatrix& matrix);

}  // namespace pivotmt
