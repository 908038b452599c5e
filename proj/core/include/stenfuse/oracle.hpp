#pragma once

#include <vector>

#include "stenfuse/correlate.hpp"
#include "stenfuse/engine.hpp"
#include "stenfuse/fusion.hpp"

namespace stenfuse {

inline constexpr long long kOracleMaxPoints = 64LL * 64 * 64;

// Ground-truth step: every coefficient row is applied to every field as
// a separate whole-array cross-correlation pass, then phi runs
// pointwise. No fusion, no tiling, no gather: only the direct stencil
// primitive, so it is an independent reference for the fused engine.
// Intentionally slow; refuses domains above 64^3.
template <typename T>
FieldSet<T> naive_oracle_step(const FieldSet<T>& fields, const FusedKernel& kernel) {
  const Shape& sh = fields.shape();
  if (sh.count() > kOracleMaxPoints)
    throw config_error("naive_oracle_step: domain " + sh.str() +
                       " exceeds the 64^3 oracle limit");
  if (fields.count() != kernel.n_fields())
    throw config_error("naive_oracle_step: field count mismatch");

  const CoefficientMatrix& A = kernel.A();
  const int ns = A.n_rows(), nf = kernel.n_fields(), nout = kernel.n_outputs();

  // Row -> sparse kernel (nonzero coefficients only, scan order).
  std::vector<StencilKernel> row_kernels;
  row_kernels.reserve(static_cast<std::size_t>(ns));
  for (int i = 0; i < ns; ++i) {
    std::vector<Offset> offsets;
    std::vector<double> coeffs;
    for (int k = 0; k < A.n_cols(); ++k) {
      if (A.at(i, k) == 0.0) continue;
      offsets.push_back(A.footprint_offset(k));
      coeffs.push_back(A.at(i, k));
    }
    row_kernels.push_back(StencilKernel::from_points(A.dims(), offsets, coeffs));
  }

  // One whole-array pass per (row, field).
  std::vector<std::vector<T>> passes(static_cast<std::size_t>(ns) * nf);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < nf; ++j) {
      const PaddedField<T> r = cross_correlate(fields.field(j), row_kernels[static_cast<std::size_t>(i)]);
      passes[static_cast<std::size_t>(i) * nf + j] = r.interior();
    }

  FieldSet<T> out = make_output_set(fields, kernel);
  std::vector<T> q(static_cast<std::size_t>(ns) * nf);
  std::vector<T> vals(static_cast<std::size_t>(nout));
  long long p = 0;
  for (long long z = 0; z < sh.nz; ++z)
    for (long long y = 0; y < sh.ny; ++y)
      for (long long x = 0; x < sh.nx; ++x, ++p) {
        for (int i = 0; i < ns; ++i)
          for (int j = 0; j < nf; ++j)
            q[static_cast<std::size_t>(i) * nf + j] =
                passes[static_cast<std::size_t>(i) * nf + j][static_cast<std::size_t>(p)];
        kernel.phi().eval(q.data(), ns, nf, Coord{x, y, z}, vals.data());
        for (int jo = 0; jo < nout; ++jo) out.field(jo).at(x, y, z) = vals[static_cast<std::size_t>(jo)];
      }
  return out;
}

}  // namespace stenfuse
