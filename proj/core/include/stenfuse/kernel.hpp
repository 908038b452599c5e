#pragma once

#include <array>
#include <cstdlib>
#include <string>
#include <vector>

#include "stenfuse/common.hpp"

namespace stenfuse {

// Stencil point offset. Ordering follows the row-wise scan used to
// flatten footprints: x fastest, then y, then z.
struct Offset {
  int x = 0, y = 0, z = 0;

  friend bool operator==(const Offset&, const Offset&) = default;
  friend bool operator<(const Offset& a, const Offset& b) {
    if (a.z != b.z) return a.z < b.z;
    if (a.y != b.y) return a.y < b.y;
    return a.x < b.x;
  }

  int chebyshev() const {
    const int ax = std::abs(x), ay = std::abs(y), az = std::abs(z);
    return std::max(ax, std::max(ay, az));
  }
};

// A sparse stencil: unique offsets with real coefficients. Offsets are
// kept sorted in scan order so that accumulation order is reproducible,
// and zero coefficients never enter the representation.
class StencilKernel {
 public:
  StencilKernel() = default;

  // `coeff_sum` is the algebraic coefficient sum carried through
  // construction (exact for generated kernels); it feeds conservation
  // checks without re-summing rounded coefficients.
  static StencilKernel from_points(int dims, std::vector<Offset> offsets,
                                   std::vector<double> coeffs, double coeff_sum);

  // Sum of rounded coefficients as the fallback when no exact sum is known.
  static StencilKernel from_points(int dims, std::vector<Offset> offsets,
                                   std::vector<double> coeffs);

  int dims() const { return dims_; }
  bool empty() const { return offsets_.empty(); }
  int size() const { return static_cast<int>(offsets_.size()); }
  const std::vector<Offset>& offsets() const { return offsets_; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff_sum() const { return coeff_sum_; }

  // Maximal Chebyshev distance from the point of interest.
  int radius() const;

  friend bool operator==(const StencilKernel&, const StencilKernel&) = default;

 private:
  int dims_ = 1;
  std::vector<Offset> offsets_;
  std::vector<double> coeffs_;
  double coeff_sum_ = 0.0;
};

// Single unit coefficient at the origin.
StencilKernel identity_kernel(int dims);

// Central finite-difference kernel for d/dx or d2/dx2 along `axis`,
// of the given even accuracy order, with grid spacing h. Coefficients
// solve the Taylor moment system in exact rational arithmetic before
// conversion to double; the 1/h^deriv scale is applied afterward.
// `dims` defaults to axis + 1.
StencilKernel central_difference(int deriv, int accuracy, int axis, double h, int dims = 0);

// Tensor product of two first-derivative kernels on distinct axes;
// evaluates the mixed partial d2/(dxa dxb).
StencilKernel mixed_partial(int axis_a, int axis_b, int accuracy, double h_a, double h_b,
                            int dims = 0);

// Weighted sum of kernels over the union of their offsets. Offsets whose
// combined coefficient is exactly zero are removed, so full cancellation
// yields an empty kernel.
StencilKernel combine(const std::vector<StencilKernel>& kernels,
                      const std::vector<double>& weights);

// Sum of per-axis second-derivative kernels: the cross-shaped discrete
// Laplacian with 2*d*(accuracy/2) + 1 points.
StencilKernel laplacian_kernel(int dims, int accuracy, const std::array<double, 3>& h);

}  // namespace stenfuse
