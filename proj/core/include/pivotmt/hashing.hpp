#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace pivotmt {

// 64-bit FNV-1a; stable across platforms and runs.
class Fnv1a {
 public:
  Fnv1a& update(std::span<const unsigned char> bytes) noexcept;
  Fnv1a& update(std::string_view text) noexcept;
  std::uint64_t digest() const noexcept { return state_; }

 private:
  std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

std::uint64_t fnv1a(std::string_view text) noexcept;
std::string hex64(std::uint64_t v);

// Hash of a file's bytes; throws FormatError when unreadable.
std::uint64_t hash_file(const std::string& path);

}  // namespace pivotmt
