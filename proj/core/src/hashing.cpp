#include "pivotmt/hashing.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <vector>

#include "pivotmt/error.hpp"

namespace pivotmt {

Fnv1a& Fnv1a::update(std::span<const unsigned char> bytes) noexcept {
  for (unsigned char b : bytes) {
    state_ ^= b;
    state_ *= 0x100000001b3ULL;
  }
  return *this;
}

Fnv1a& Fnv1a::update(std::string_view text) noexcept {
  return update(std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(text.data()), text.size()));
}

std::uint64_t fnv1a(std::string_view text) noexcept { return Fnv1a().update(text).digest(); }

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::uint64_t hash_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open '" + path + "'");
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return fnv1a(std::string_view(bytes.data(), bytes.size()));
}

}  // namespace pivotmt
