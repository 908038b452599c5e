#include "stenfuse/fusion.hpp"

#include <algorithm>

namespace stenfuse {
namespace {

int pow_int(int base, int e) {
  int v = 1;
  for (int i = 0; i < e; ++i) v *= base;
  return v;
}

MacPlan build_plan(const CoefficientMatrix& A, int nf, const std::vector<std::uint8_t>* used) {
  const int side = A.side();
  const int r = A.radius();
  MacPlan plan;
  plan.slices.resize(A.dims() == 3 ? static_cast<std::size_t>(side) : 1);

  plan.row_fields.resize(static_cast<std::size_t>(A.n_rows()));
  for (int i = 0; i < A.n_rows(); ++i) {
    auto& jf = plan.row_fields[static_cast<std::size_t>(i)];
    for (int j = 0; j < nf; ++j)
      if (!used || (*used)[static_cast<std::size_t>(i) * nf + j]) jf.push_back(j);
  }

  for (int k = 0; k < A.n_cols(); ++k) {
    const Offset o = A.footprint_offset(k);
    const std::size_t slice = A.dims() == 3 ? static_cast<std::size_t>(o.z + r) : 0;
    for (int i = 0; i < A.n_rows(); ++i) {
      if (used && A.at(i, k) == 0.0) continue;
      if (used && plan.row_fields[static_cast<std::size_t>(i)].empty()) continue;
      plan.slices[slice].entries.push_back({k, o.x + r, o.y + r, i});
      plan.mac_count +=
          static_cast<long long>(plan.row_fields[static_cast<std::size_t>(i)].size());
    }
  }
  return plan;
}

}  // namespace

CoefficientMatrix CoefficientMatrix::from_kernels(const std::vector<StencilKernel>& kernels,
                                                  const std::vector<RowDescriptor>& rows,
                                                  int radius, int dims) {
  if (kernels.size() != rows.size())
    throw std::invalid_argument("CoefficientMatrix: kernels/descriptors length mismatch");
  if (dims < 1 || dims > 3) throw std::invalid_argument("CoefficientMatrix: bad dims");
  CoefficientMatrix m;
  m.radius_ = radius;
  m.dims_ = dims;
  m.ns_ = static_cast<int>(kernels.size());
  m.nk_ = pow_int(2 * radius + 1, dims);
  m.rows_ = rows;
  m.a_.assign(static_cast<std::size_t>(m.ns_) * m.nk_, 0.0);
  for (int i = 0; i < m.ns_; ++i) {
    const auto& k = kernels[static_cast<std::size_t>(i)];
    if (!k.empty() && k.radius() > radius)
      throw std::invalid_argument("CoefficientMatrix: kernel exceeds footprint radius");
    for (std::size_t s = 0; s < k.offsets().size(); ++s) {
      const int col = m.footprint_index(k.offsets()[s]);
      m.a_[static_cast<std::size_t>(i) * m.nk_ + col] = k.coeffs()[s];
    }
  }
  return m;
}

CoefficientMatrix CoefficientMatrix::from_dense(int n_rows, int radius, int dims,
                                                const std::vector<double>& values,
                                                std::vector<RowDescriptor> rows) {
  CoefficientMatrix m;
  m.ns_ = n_rows;
  m.radius_ = radius;
  m.dims_ = dims;
  m.nk_ = pow_int(2 * radius + 1, dims);
  if (values.size() != static_cast<std::size_t>(m.ns_) * m.nk_)
    throw std::invalid_argument("CoefficientMatrix: dense size mismatch");
  m.a_ = values;
  if (rows.empty())
    rows.resize(static_cast<std::size_t>(n_rows), RowDescriptor{RowOp::custom, ""});
  if (rows.size() != static_cast<std::size_t>(n_rows))
    throw std::invalid_argument("CoefficientMatrix: descriptor count mismatch");
  m.rows_ = std::move(rows);
  return m;
}

int CoefficientMatrix::footprint_index(const Offset& o) const {
  const int side = 2 * radius_ + 1;
  if (o.chebyshev() > radius_)
    throw std::out_of_range("CoefficientMatrix: offset outside footprint");
  int k = o.x + radius_;
  if (dims_ >= 2) k += (o.y + radius_) * side;
  if (dims_ == 3) k += (o.z + radius_) * side * side;
  return k;
}

Offset CoefficientMatrix::footprint_offset(int k) const {
  const int side = 2 * radius_ + 1;
  Offset o;
  o.x = k % side - radius_;
  if (dims_ >= 2) o.y = (k / side) % side - radius_;
  if (dims_ == 3) o.z = k / (side * side) - radius_;
  return o;
}

int CoefficientMatrix::find_row(RowOp op) const {
  for (int i = 0; i < ns_; ++i)
    if (rows_[static_cast<std::size_t>(i)].op == op) return i;
  throw std::invalid_argument("CoefficientMatrix: no row with requested operator");
}

FusedKernel::FusedKernel(CoefficientMatrix A, std::shared_ptr<const PointPhi> phi, int n_fields)
    : A_(std::move(A)), phi_(std::move(phi)), nf_(n_fields) {
  if (!phi_) throw std::invalid_argument("FusedKernel: null phi");
  used_.assign(static_cast<std::size_t>(A_.n_rows()) * nf_, 0);
  for (int out = 0; out < phi_->n_outputs(); ++out) {
    for (const QRef& ref : phi_->used_entries(out)) {
      if (ref.row < 0 || ref.row >= A_.n_rows() || ref.field < 0 || ref.field >= nf_)
        throw std::invalid_argument("FusedKernel: phi reads Q outside its shape");
      used_[static_cast<std::size_t>(ref.row) * nf_ + ref.field] = 1;
    }
  }
  plan_full_ = build_plan(A_, nf_, nullptr);
  plan_pruned_ = build_plan(A_, nf_, &used_);
}

FusedKernel prune(const FusedKernel& kernel) {
  FusedKernel k = kernel;
  k.set_pruned(true);
  return k;
}

double operational_intensity(const FusedKernel& kernel, Dtype dtype) {
  const double flops =
      2.0 * static_cast<double>(kernel.mac_count()) + kernel.phi().flops_per_point();
  const double bytes =
      static_cast<double>(kernel.n_fields() + kernel.n_outputs()) * dtype_bytes(dtype);
  return flops / bytes;
}

}  // namespace stenfuse
