#pragma once

#include <cstdint>
#include <string_view>

namespace causal_pulse {

inline std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Per-task seed that depends only on the run seed and the task's key.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::string_view key) noexcept {
  return splitmix64(fnv1a64(key) ^ run_seed);
}

}  // namespace causal_pulse
