#pragma once

#include "stenfuse/field.hpp"
#include "stenfuse/kernel.hpp"

namespace stenfuse {

// Direct cross-correlation: out_i = sum_s c_s * f(i + s) over the padded
// array's stencil points in scan order. Shape-preserving and
// out-of-place; the caller must have refreshed the halo.
template <typename T>
PaddedField<T> cross_correlate(const PaddedField<T>& f, const StencilKernel& kernel) {
  if (kernel.empty()) {
    PaddedField<T> out(f.shape(), f.halo(), f.policy());
    return out;  // empty kernel: all-zero output
  }
  if (f.halo() < kernel.radius())
    throw config_error("cross_correlate: field halo " + std::to_string(f.halo()) +
                       " smaller than kernel radius " + std::to_string(kernel.radius()));

  PaddedField<T> out(f.shape(), f.halo(), f.policy());
  const int n = kernel.size();
  std::vector<T> c(static_cast<std::size_t>(n));
  std::vector<long long> off(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    c[static_cast<std::size_t>(s)] = static_cast<T>(kernel.coeffs()[static_cast<std::size_t>(s)]);
    const Offset& o = kernel.offsets()[static_cast<std::size_t>(s)];
    off[static_cast<std::size_t>(s)] = o.x + o.y * f.stride_y() + o.z * f.stride_z();
  }

  const Shape& sh = f.shape();
  const T* in = f.data();
  T* res = out.data();
  for (long long k = 0; k < sh.nz; ++k) {
    for (long long j = 0; j < sh.ny; ++j) {
      const long long row = f.offset(0, j, k);
      for (long long i = 0; i < sh.nx; ++i) {
        T acc = T(0);
        const long long p = row + i;
        for (int s = 0; s < n; ++s)
          acc += c[static_cast<std::size_t>(s)] * in[p + off[static_cast<std::size_t>(s)]];
        res[p] = acc;
      }
    }
  }
  return out;
}

}  // namespace stenfuse
