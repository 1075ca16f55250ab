#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace localmine {

/// Lowercase hex SHA-256 of the bytes.
std::string sha256_hex(std::string_view data);

std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Uniform integer in [0, n) by rejection; identical across standard libraries.
std::uint64_t bounded_uniform(std::mt19937_64& rng, std::uint64_t n);

/// Fisher-Yates using bounded_uniform.
template <typename It>
void seeded_shuffle(It first, It last, std::mt19937_64& rng) {
  const auto n = static_cast<std::uint64_t>(last - first);
  for (std::uint64_t i = n; i > 1; --i) {
    const std::uint64_t j = bounded_uniform(rng, i);
    std::iter_swap(first + static_cast<std::ptrdiff_t>(i - 1), first + static_cast<std::ptrdiff_t>(j));
  }
}

}  // namespace localmine
