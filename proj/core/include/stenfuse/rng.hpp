#pragma once

#include <cstdint>

namespace stenfuse {

// Counter-based generator built on the SplitMix64 finalizer. Each
// (seed, stream) pair defines an independent stream; element m of a
// stream is a pure function of (seed, stream, m), so fills are
// order-independent and reproducible bit-for-bit within this
// implementation regardless of threading.
namespace rng {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

inline std::uint64_t mix64(std::uint64_t z) {
  z += kGolden;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t stream_key(std::uint64_t seed, std::uint64_t stream) {
  return mix64(seed ^ (kGolden * (stream + 1)));
}

// Uniform in [0, 1) with 53 random bits.
inline double uniform01(std::uint64_t key, std::uint64_t counter) {
  const std::uint64_t bits = mix64(key + kGolden * (counter + 1));
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

inline double uniform(std::uint64_t key, std::uint64_t counter, double lo, double hi) {
  return lo + (hi - lo) * uniform01(key, counter);
}

}  // namespace rng
}  // namespace stenfuse
