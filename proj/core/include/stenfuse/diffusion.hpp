#pragma once

#include <array>

#include "stenfuse/correlate.hpp"
#include "stenfuse/fusion.hpp"
#include "stenfuse/kernel.hpp"

namespace stenfuse {

// Forward-Euler diffusion with central differences, fused into a single
// stencil: g = identity + dt*alpha*laplacian. The combined kernel has
// coefficient sum exactly 1, which conserves the interior sum on
// periodic domains.
struct DiffusionProblem {
  double alpha = 1.0;
  double dt = 0.0;
  std::array<double, 3> h{1.0, 1.0, 1.0};
  int accuracy = 6;
  int dims = 3;
  BoundaryPolicy boundary = BoundaryPolicy::periodic();

  void validate() const {
    if (alpha <= 0) throw config_error("diffusion: alpha must be > 0");
    if (dt < 0) throw config_error("diffusion: dt must be >= 0");
    if (dims < 1 || dims > 3) throw config_error("diffusion: dims must be in {1,2,3}");
  }
};

inline StencilKernel diffusion_fused_kernel(const DiffusionProblem& p) {
  p.validate();
  return combine({identity_kernel(p.dims), laplacian_kernel(p.dims, p.accuracy, p.h)},
                 {1.0, p.dt * p.alpha});
}

template <typename T>
PaddedField<T> diffusion_step(const PaddedField<T>& f, const DiffusionProblem& p) {
  return cross_correlate(f, diffusion_fused_kernel(p));
}

// The same update as a one-row fused kernel with a pass-through output,
// for the tiled execution strategies.
inline FusedKernel diffusion_as_fused(const DiffusionProblem& p, int n_fields = 1) {
  const StencilKernel g = diffusion_fused_kernel(p);
  const int r = g.radius();
  CoefficientMatrix A = CoefficientMatrix::from_kernels(
      {g}, {RowDescriptor{RowOp::custom, "diffusion"}}, r, p.dims);
  return FusedKernel(std::move(A), std::make_shared<PassThroughPhi>(0, n_fields), n_fields);
}

}  // namespace stenfuse
