#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace uavassoc {

using Rng = std::mt19937_64;

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Pure seed derivation: (master, index, purpose) -> seed. No global state.
inline constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index,
                                           std::string_view purpose) noexcept {
  return splitmix64(splitmix64(master ^ fnv1a64(purpose)) + splitmix64(index));
}

/// Maps 64 random bits to a double strictly inside (0, 1).
inline constexpr double unit_open(std::uint64_t bits) noexcept {
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace uavassoc
