#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace pivotmt {

using Rng = std::mt19937_64;

// splitmix64 finalizer; derives independent stream seeds from a root seed.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

// Fisher-Yates permutation of 0..n-1.
std::vector<std::size_t> shuffled_indices(std::size_t n, Rng& rng);

// Uniform integer in [0, n).
std::size_t uniform_index(Rng& rng, std::size_t n);

}  // namespace pivotmt
