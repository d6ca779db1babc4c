#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace fcp {

inline std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream identified by a base seed and a tuple of
/// integer coordinates (e.g. p, replication, variant). Depends only on the
/// values, never on scheduling.
inline std::uint64_t stream_seed(std::uint64_t base,
                                 std::initializer_list<std::uint64_t> coords) noexcept {
  std::uint64_t h = splitmix64(base);
  for (auto c : coords)
    h = splitmix64(h ^ splitmix64(c + 0x632be59bd9b4e019ULL));
  return h;
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t base,
                       std::initializer_list<std::uint64_t> coords) {
  return Rng(stream_seed(base, coords));
}

} // namespace fcp
