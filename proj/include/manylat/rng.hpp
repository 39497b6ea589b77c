#pragma once

#include <cstdint>

#include "manylat/lattice.hpp"

namespace manylat {

// Stateless counter-based generator. Each output is a hash of its key, so a
// value depends only on (seed, stream, coordinates), never on call order or
// thread schedule.
namespace rng {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t mix(uint64_t h, uint64_t v) { return splitmix64(h ^ v); }

inline uint64_t key(uint64_t seed, uint64_t stream, const IVec& coords) {
  uint64_t h = splitmix64(seed);
  h = mix(h, stream);
  for (long c : coords) h = mix(h, uint64_t(int64_t(c)));
  return h;
}

// uniform in [0, 1)
inline double uniform01(uint64_t hashed) {
  return double(hashed >> 11) * 0x1.0p-53;
}

inline double uniform01(uint64_t seed, uint64_t stream, const IVec& coords) {
  return uniform01(key(seed, stream, coords));
}

// small helper for scalar streams (configuration sampling in checks)
struct Sequence {
  uint64_t state;
  explicit Sequence(uint64_t seed) : state(splitmix64(seed)) {}
  uint64_t next_u64() { return state = splitmix64(state); }
  double next01() { return uniform01(next_u64()); }
  long below(long n) { return long(next_u64() % uint64_t(n)); }
};

}  // namespace rng
}  // namespace manylat
