#pragma once

#include <cstdint>
#include <string>

// Counter-based uniform generator.  Every draw is a pure function of
// (seed, stream, index), so parallel generation and re-runs produce
// bit-identical output regardless of scheduling or platform.

namespace vinedep::rng {

inline constexpr const char* kGeneratorId = "splitmix64-ctr-v1";

inline uint64_t mix64(uint64_t z) {
  z ^= z >> 33;
  z *= 0xff51afd7ed558ccdULL;
  z ^= z >> 33;
  z *= 0xc4ceb9fe1a85ec53ULL;
  z ^= z >> 33;
  return z;
}

// Uniform draw strictly inside (0, 1).
inline double u01(uint64_t seed, uint64_t stream, uint64_t index) {
  uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ULL);
  h = mix64(h ^ (stream + 0xbf58476d1ce4e5b9ULL));
  h = mix64(h ^ (index + 0x94d049bb133111ebULL));
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

// Stable stream id for a named column (FNV-1a).
inline uint64_t stream_of(const std::string& name) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace vinedep::rng
