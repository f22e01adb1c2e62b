#pragma once

#include <cstdint>
#include <random>

namespace prqc {

// splitmix64: used to derive independent child seeds from a master seed so
// that parallel evaluation order cannot change the streams.
inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t child_seed(uint64_t master, uint64_t stream) {
  return splitmix64(master ^ splitmix64(stream + 1));
}

using Rng = std::mt19937_64;

inline Rng make_rng(uint64_t seed) { return Rng(splitmix64(seed)); }

}  // namespace prqc
