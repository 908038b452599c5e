#pragma once

#include <memory>
#include <string>
#include <vector>

#include "stenfuse/field.hpp"
#include "stenfuse/kernel.hpp"
#include "stenfuse/phi.hpp"

namespace stenfuse {

enum class RowOp { value, ddx, ddy, ddz, dxx, dyy, dzz, dxy, dyz, dxz, custom };

struct RowDescriptor {
  RowOp op = RowOp::custom;
  std::string label;
};

// The linear-stage coefficient matrix A (n_s x n_k): one row per
// cross-correlation kernel, columns indexed by the flattened box
// footprint of side (2r+1) in scan order (x fastest, then y, then z).
class CoefficientMatrix {
 public:
  CoefficientMatrix() = default;

  static CoefficientMatrix from_kernels(const std::vector<StencilKernel>& kernels,
                                        const std::vector<RowDescriptor>& rows, int radius,
                                        int dims);
  static CoefficientMatrix from_dense(int n_rows, int radius, int dims,
                                      const std::vector<double>& values,
                                      std::vector<RowDescriptor> rows = {});

  int n_rows() const { return ns_; }
  int n_cols() const { return nk_; }
  int radius() const { return radius_; }
  int dims() const { return dims_; }
  int side() const { return 2 * radius_ + 1; }

  double at(int row, int k) const { return a_[static_cast<std::size_t>(row) * nk_ + k]; }
  const std::vector<double>& values() const { return a_; }
  const RowDescriptor& row(int i) const { return rows_[static_cast<std::size_t>(i)]; }
  const std::vector<RowDescriptor>& rows() const { return rows_; }

  // Index of a stencil offset in the flattened footprint.
  int footprint_index(const Offset& o) const;
  // Inverse of footprint_index.
  Offset footprint_offset(int k) const;

  // Rows of a specific operator, by descriptor.
  int find_row(RowOp op) const;

 private:
  int ns_ = 0, nk_ = 0, radius_ = 0, dims_ = 1;
  std::vector<double> a_;
  std::vector<RowDescriptor> rows_;
};

// Per-point gathered neighborhood: B (n_k x n_f), column j holding the
// flattened footprint of field j around the center.
template <typename T>
struct GatheredBlock {
  int nk = 0;
  int nf = 0;
  Coord center;
  std::vector<T> b;  // row-major, b[k * nf + j]

  T at(int k, int j) const { return b[static_cast<std::size_t>(k) * nf + j]; }
};

template <typename T>
GatheredBlock<T> gather(const FieldSet<T>& fields, Coord center, int r, int dims) {
  const Shape& sh = fields.shape();
  if (center.x < 0 || center.x >= sh.nx || center.y < 0 || center.y >= sh.ny || center.z < 0 ||
      center.z >= sh.nz)
    throw std::out_of_range("gather: center outside interior");
  if (fields.halo() < r) throw config_error("gather: halo smaller than radius");

  const int side = 2 * r + 1;
  const int nf = fields.count();
  GatheredBlock<T> blk;
  blk.nf = nf;
  blk.center = center;
  blk.nk = dims == 3 ? side * side * side : dims == 2 ? side * side : side;
  blk.b.resize(static_cast<std::size_t>(blk.nk) * nf);

  int k = 0;
  const int zr = dims == 3 ? r : 0;
  const int yr = dims >= 2 ? r : 0;
  for (int sz = -zr; sz <= zr; ++sz)
    for (int sy = -yr; sy <= yr; ++sy)
      for (int sx = -r; sx <= r; ++sx) {
        for (int j = 0; j < nf; ++j)
          blk.b[static_cast<std::size_t>(k) * nf + j] =
              fields.field(j).at(center.x + sx, center.y + sy, center.z + sz);
        ++k;
      }
  return blk;
}

// Q = A B in the fixed evaluation order: k outermost, then rows, then
// fields, with the field loop blocked into groups of col_block columns.
// Blocking changes scheduling only; per-(i,j) accumulation over k stays
// in ascending-k order.
template <typename T>
std::vector<T> linear_stage(const CoefficientMatrix& A, const GatheredBlock<T>& B,
                            int col_block = 0) {
  if (A.n_cols() != B.nk) throw std::logic_error("linear_stage: A.cols != B.rows");
  const int ns = A.n_rows(), nk = A.n_cols(), nf = B.nf;
  if (col_block <= 0) col_block = nf;
  std::vector<T> q(static_cast<std::size_t>(ns) * nf, T(0));
  for (int j0 = 0; j0 < nf; j0 += col_block) {
    const int j1 = std::min(nf, j0 + col_block);
    for (int k = 0; k < nk; ++k) {
      const T* brow = B.b.data() + static_cast<std::size_t>(k) * nf;
      for (int i = 0; i < ns; ++i) {
        const T a = static_cast<T>(A.at(i, k));
        T* qrow = q.data() + static_cast<std::size_t>(i) * nf;
        for (int j = j0; j < j1; ++j) qrow[j] += a * brow[j];
      }
    }
  }
  return q;
}

// Execution plan for the per-point multiply-accumulate stream. Entries
// are grouped by z-slice of the footprint so the streaming engine can
// consume one input plane at a time; iterating slices then entries
// visits k in ascending order, preserving the accumulation order of the
// plain triple loop.
struct MacPlan {
  struct Entry {
    int k;       // flattened footprint index
    int sx, sy;  // in-plane offset + radius, in [0, 2r]
    int row;
  };
  struct Slice {
    std::vector<Entry> entries;
  };
  std::vector<Slice> slices;                  // size 2r+1 (3-D) or 1
  std::vector<std::vector<int>> row_fields;   // used field columns per row
  long long mac_count = 0;
};

// A fused stencil kernel: the coefficient matrix plus the nonlinear
// output stage, with bookkeeping of which Q entries the outputs read.
class FusedKernel {
 public:
  FusedKernel() = default;
  FusedKernel(CoefficientMatrix A, std::shared_ptr<const PointPhi> phi, int n_fields);

  const CoefficientMatrix& A() const { return A_; }
  const PointPhi& phi() const { return *phi_; }
  const std::shared_ptr<const PointPhi>& phi_ptr() const { return phi_; }
  int n_fields() const { return nf_; }
  int n_outputs() const { return phi_->n_outputs(); }
  int radius() const { return A_.radius(); }
  int dims() const { return A_.dims(); }

  bool pruned() const { return pruned_; }
  void set_pruned(bool p) { pruned_ = p; }
  const MacPlan& plan() const { return pruned_ ? plan_pruned_ : plan_full_; }
  const MacPlan& plan_full() const { return plan_full_; }
  const MacPlan& plan_pruned() const { return plan_pruned_; }

  // Per-point multiply-accumulate count under the active plan.
  long long mac_count() const { return plan().mac_count; }

  bool entry_used(int row, int field) const {
    return used_[static_cast<std::size_t>(row) * nf_ + field] != 0;
  }

 private:
  CoefficientMatrix A_;
  std::shared_ptr<const PointPhi> phi_;
  int nf_ = 0;
  bool pruned_ = false;
  std::vector<std::uint8_t> used_;  // union over outputs, ns x nf
  MacPlan plan_full_;
  MacPlan plan_pruned_;
};

// Pruned copy: the MAC stream skips zero coefficients and Q entries no
// output reads. Outputs are unchanged element-for-element.
FusedKernel prune(const FusedKernel& kernel);

// FLOPs per byte of ideal traffic (one read of the input fields, one
// write of the outputs per point), under the kernel's active plan.
double operational_intensity(const FusedKernel& kernel, Dtype dtype);

}  // namespace stenfuse
