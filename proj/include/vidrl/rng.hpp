#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace vidrl {

// splitmix64 finalizer; decorrelates derived seeds.
inline uint64_t mix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic child seed from a master seed and a path of indices,
// e.g. derive_seed(seed, {step, input_idx, lane}).
inline uint64_t derive_seed(uint64_t seed, std::initializer_list<uint64_t> path) {
  uint64_t h = mix64(seed);
  for (uint64_t p : path) h = mix64(h ^ p);
  return h;
}

inline std::mt19937_64 make_stream(uint64_t seed, std::initializer_list<uint64_t> path) {
  return std::mt19937_64(derive_seed(seed, path));
}

}  // namespace vidrl
