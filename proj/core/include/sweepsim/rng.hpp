// =============================================================================
// rng.hpp — deterministic per-replicate random streams.
//
// Every Monte Carlo replicate draws from its own mt19937_64 engine whose seed
// is a counter-based hash of (master seed, cell index, replicate index).
// Streams therefore depend only on those indices, never on thread scheduling:
// running with 1 worker or 16 produces bit-identical results.
// =============================================================================
#pragma once

#include <cstdint>
#include <random>

namespace sweepsim {

/// splitmix64 step (Steele, Lea & Flood 2014) — the standard 64-bit mixer.
inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// An mt19937_64 engine seeded from (master_seed, cell, replicate).
/// `cell` distinguishes parameter-grid cells (or experiment phases) so that
/// replicate streams never collide across cells.
inline std::mt19937_64 make_stream(std::uint64_t master_seed,
                                   std::uint64_t cell,
                                   std::uint64_t replicate) {
  std::uint64_t state = master_seed;
  state ^= splitmix64_next(state) + 0x9e3779b97f4a7c15ULL * (cell + 1);
  state ^= splitmix64_next(state) + 0xbf58476d1ce4e5b9ULL * (replicate + 1);
  std::seed_seq seq{
      static_cast<std::uint32_t>(splitmix64_next(state)),
      static_cast<std::uint32_t>(splitmix64_next(state)),
      static_cast<std::uint32_t>(splitmix64_next(state)),
      static_cast<std::uint32_t>(splitmix64_next(state)),
      static_cast<std::uint32_t>(splitmix64_next(state)),
      static_cast<std::uint32_t>(splitmix64_next(state)),
  };
  return std::mt19937_64(seq);
}

inline std::mt19937_64 make_stream(std::uint64_t master_seed,
                                   std::uint64_t replicate) {
  return make_stream(master_seed, 0, replicate);
}

}  // namespace sweepsim
