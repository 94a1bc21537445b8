#include "pivotmt/features.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "pivotmt/error.hpp"
#include "pivotmt/text.hpp"

namespace pivotmt {
namespace {

std::size_t parse_size(const std::string& s, const std::string& where) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw FormatError(where + ": bad header field '" + s + "'");
  return v;
}

}  // namespace

FeatureFile load_features(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open feature file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path + ": missing header");
  const auto header = split_whitespace(line);
  if (header.size() != 2) throw FormatError(path + ": header must be '<count> <dim>'");

  FeatureFile out;
  FeatureMatrix& m = out.matrix;
  m.count = parse_size(header[0], path);
  m.dim = parse_size(header[1], path);
  if (m.count > 0 && m.dim == 0) throw FormatError(path + ": zero dimension");
  m.values.reserve(m.count * m.dim);

  for (std::size_t r = 0; r < m.count; ++r) {
    if (!std::getline(in, line)) {
      throw FormatError(path + ": expected " + std::to_string(m.count) + " rows, found " + std::to_string(r));
    }
    const auto fields = split_whitespace(line);
    if (fields.size() != m.dim) {
      throw FormatError(path + ": row " + std::to_string(r + 1) + " has " + std::to_string(fields.size()) +
                        " values, header says " + std::to_string(m.dim));
    }
    for (const auto& f : fields) {
      float v = 0.0f;
      auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
      if (ec != std::errc() || ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw FormatError(path + ": row " + std::to_string(r + 1) + ": invalid value '" + f + "'");
      }
      m.values.push_back(v);
    }
    out.ids.push_back(std::to_string(r));
  }
  while (std::getline(in, line)) {
    if (!split_whitespace(line).empty()) throw FormatError(path + ": more rows than header count");
  }
  return out;
}

void save_features(const std::string& path, const FeatureMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write feature file '" + path + "'");
  out << m.count << ' ' << m.dim << '\n';
  char buf[32];
  for (std::size_t r = 0; r < m.count; ++r) {
    for (std::size_t c = 0; c < m.dim; ++c) {
      const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, m.values[r * m.dim + c]);
      if (c) out << ' ';
      out.write(buf, ptr - buf);
    }
    out << '\n';
  }
}

}  // namespace pivotmt
