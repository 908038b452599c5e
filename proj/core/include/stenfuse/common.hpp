#pragma once

#include <atomic>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace stenfuse {

enum class Dtype { f32, f64 };

inline int dtype_bytes(Dtype t) { return t == Dtype::f32 ? 4 : 8; }
inline const char* dtype_name(Dtype t) { return t == Dtype::f32 ? "fp32" : "fp64"; }

template <typename T>
constexpr Dtype dtype_of() {
  static_assert(std::is_same_v<T, float> || std::is_same_v<T, double>);
  if constexpr (std::is_same_v<T, float>) return Dtype::f32;
  return Dtype::f64;
}

// Configuration / spec-file problems. The CLI maps these to exit code 2.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Non-finite values or failures while stepping. CLI exit code 3.
class numeric_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Coord {
  long long x = 0, y = 0, z = 0;
  friend bool operator==(const Coord&, const Coord&) = default;
};

// Global instrumentation used by the benchmark harness to assert that
// halo refreshes never happen inside timed regions.
namespace instrument {
inline std::atomic<std::uint64_t> halo_refreshes{0};
inline std::uint64_t halo_refresh_count() { return halo_refreshes.load(); }
}  // namespace instrument

}  // namespace stenfuse
