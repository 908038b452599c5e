#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "stenfuse/common.hpp"

namespace stenfuse {

// Interior extents of a field. Up to three dimensions; trailing unused
// dimensions are 1.
struct Shape {
  long long nx = 1, ny = 1, nz = 1;

  Shape() = default;
  Shape(long long x, long long y = 1, long long z = 1) : nx(x), ny(y), nz(z) {
    if (nx < 1 || ny < 1 || nz < 1)
      throw std::invalid_argument("Shape: extents must be >= 1");
  }

  long long count() const { return nx * ny * nz; }
  long long extent(int axis) const { return axis == 0 ? nx : axis == 1 ? ny : nz; }

  // Number of spatial dimensions actually used.
  int dims() const { return nz > 1 ? 3 : ny > 1 ? 2 : 1; }

  friend bool operator==(const Shape&, const Shape&) = default;

  std::string str() const {
    return std::to_string(nx) + "x" + std::to_string(ny) + "x" + std::to_string(nz);
  }
};

// Row-wise scan order: x fastest, then y, then z.
inline long long linear_index(long long i, long long j, long long k, const Shape& s) {
  if (i < 0 || i >= s.nx || j < 0 || j >= s.ny || k < 0 || k >= s.nz)
    throw std::out_of_range("linear_index: coordinate outside shape " + s.str());
  return i + j * s.nx + k * s.nx * s.ny;
}

}  // namespace stenfuse
