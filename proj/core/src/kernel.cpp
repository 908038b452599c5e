#include "stenfuse/kernel.hpp"

#include <algorithm>
#include <map>

#include "stenfuse/rational.hpp"

namespace stenfuse {
namespace {

void check_dims(int dims) {
  if (dims < 1 || dims > 3) throw std::invalid_argument("kernel: dims must be in {1,2,3}");
}

Offset axis_offset(int axis, int j) {
  switch (axis) {
    case 0: return {j, 0, 0};
    case 1: return {0, j, 0};
    case 2: return {0, 0, j};
    default: throw std::invalid_argument("kernel: axis must be in {0,1,2}");
  }
}

// Solve sum_j c_j * j^m = m! * [m == deriv] for m = 0..2r over the
// offsets j = -r..r, by Gauss-Jordan elimination on exact rationals.
std::vector<Rational> moment_system(int deriv, int r) {
  const int n = 2 * r + 1;
  std::vector<std::vector<Rational>> m(static_cast<std::size_t>(n));
  std::vector<Rational> rhs(static_cast<std::size_t>(n));
  for (int row = 0; row < n; ++row) {
    m[row].resize(static_cast<std::size_t>(n));
    for (int col = 0; col < n; ++col) {
      const int j = col - r;
      std::int64_t p = 1;
      for (int e = 0; e < row; ++e) p *= j;
      m[row][col] = Rational(p);
    }
    std::int64_t fact = 1;
    for (int e = 2; e <= row; ++e) fact *= e;
    rhs[row] = (row == deriv) ? Rational(fact) : Rational::zero();
  }
  for (int col = 0; col < n; ++col) {
    int pivot = -1;
    for (int row = col; row < n; ++row)
      if (!m[row][col].is_zero()) {
        pivot = row;
        break;
      }
    if (pivot < 0) throw std::logic_error("moment system is singular");
    std::swap(m[col], m[pivot]);
    std::swap(rhs[col], rhs[pivot]);
    const Rational inv = Rational(1) / m[col][col];
    for (int c2 = 0; c2 < n; ++c2) m[col][c2] = m[col][c2] * inv;
    rhs[col] = rhs[col] * inv;
    for (int row = 0; row < n; ++row) {
      if (row == col || m[row][col].is_zero()) continue;
      const Rational f = m[row][col];
      for (int c2 = 0; c2 < n; ++c2) m[row][c2] = m[row][c2] - f * m[col][c2];
      rhs[row] = rhs[row] - f * rhs[col];
    }
  }
  return rhs;
}

}  // namespace

StencilKernel StencilKernel::from_points(int dims, std::vector<Offset> offsets,
                                         std::vector<double> coeffs, double coeff_sum) {
  check_dims(dims);
  if (offsets.size() != coeffs.size())
    throw std::invalid_argument("StencilKernel: offsets/coeffs length mismatch");
  std::vector<std::size_t> order(offsets.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return offsets[a] < offsets[b]; });
  StencilKernel k;
  k.dims_ = dims;
  k.coeff_sum_ = coeff_sum;
  const Offset* prev = nullptr;
  for (std::size_t i = 0; i < order.size(); ++i) {
    const Offset& o = offsets[order[i]];
    if (prev && *prev == o) throw std::invalid_argument("StencilKernel: duplicate offset");
    prev = &o;
    if (coeffs[order[i]] == 0.0) continue;
    k.offsets_.push_back(o);
    k.coeffs_.push_back(coeffs[order[i]]);
  }
  return k;
}

StencilKernel StencilKernel::from_points(int dims, std::vector<Offset> offsets,
                                         std::vector<double> coeffs) {
  double s = 0.0;
  for (double c : coeffs) s += c;
  return from_points(dims, std::move(offsets), std::move(coeffs), s);
}

int StencilKernel::radius() const {
  if (empty()) throw std::invalid_argument("radius: empty kernel");
  int r = 0;
  for (const auto& o : offsets_) r = std::max(r, o.chebyshev());
  return r;
}

StencilKernel identity_kernel(int dims) {
  return StencilKernel::from_points(dims, {Offset{0, 0, 0}}, {1.0}, 1.0);
}

StencilKernel central_difference(int deriv, int accuracy, int axis, double h, int dims) {
  if (deriv != 1 && deriv != 2)
    throw std::invalid_argument("central_difference: deriv must be 1 or 2");
  if (accuracy != 2 && accuracy != 4 && accuracy != 6)
    throw std::invalid_argument("central_difference: accuracy must be in {2,4,6}");
  if (h <= 0) throw std::invalid_argument("central_difference: h must be > 0");
  if (axis < 0 || axis > 2) throw std::invalid_argument("central_difference: bad axis");
  if (dims == 0) dims = axis + 1;
  if (axis >= dims) throw std::invalid_argument("central_difference: axis >= dims");

  const int r = accuracy / 2;
  const std::vector<Rational> c = moment_system(deriv, r);
  const double scale = deriv == 1 ? 1.0 / h : 1.0 / (h * h);

  std::vector<Offset> offsets;
  std::vector<double> coeffs;
  for (int j = -r; j <= r; ++j) {
    offsets.push_back(axis_offset(axis, j));
    coeffs.push_back(c[static_cast<std::size_t>(j + r)].to_double() * scale);
  }
  Rational rsum = Rational::zero();
  for (const auto& v : c) rsum = rsum + v;
  return StencilKernel::from_points(dims, std::move(offsets), std::move(coeffs),
                                    rsum.to_double() * scale);
}

StencilKernel mixed_partial(int axis_a, int axis_b, int accuracy, double h_a, double h_b,
                            int dims) {
  if (axis_a == axis_b) throw std::invalid_argument("mixed_partial: axes must differ");
  if (dims == 0) dims = std::max(axis_a, axis_b) + 1;
  const StencilKernel da = central_difference(1, accuracy, axis_a, h_a, dims);
  const StencilKernel db = central_difference(1, accuracy, axis_b, h_b, dims);
  std::vector<Offset> offsets;
  std::vector<double> coeffs;
  for (std::size_t ia = 0; ia < da.offsets().size(); ++ia) {
    for (std::size_t ib = 0; ib < db.offsets().size(); ++ib) {
      Offset o = da.offsets()[ia];
      const Offset& ob = db.offsets()[ib];
      o.x += ob.x;
      o.y += ob.y;
      o.z += ob.z;
      offsets.push_back(o);
      coeffs.push_back(da.coeffs()[ia] * db.coeffs()[ib]);
    }
  }
  return StencilKernel::from_points(dims, std::move(offsets), std::move(coeffs),
                                    da.coeff_sum() * db.coeff_sum());
}

StencilKernel combine(const std::vector<StencilKernel>& kernels,
                      const std::vector<double>& weights) {
  if (kernels.empty()) throw std::invalid_argument("combine: no kernels");
  if (kernels.size() != weights.size())
    throw std::invalid_argument("combine: kernels/weights length mismatch");
  const int dims = kernels.front().dims();
  for (const auto& k : kernels)
    if (k.dims() != dims) throw std::invalid_argument("combine: dimensionality mismatch");

  std::map<Offset, double> acc;
  for (std::size_t m = 0; m < kernels.size(); ++m) {
    const auto& k = kernels[m];
    for (std::size_t i = 0; i < k.offsets().size(); ++i)
      acc[k.offsets()[i]] += weights[m] * k.coeffs()[i];
  }
  std::vector<Offset> offsets;
  std::vector<double> coeffs;
  for (const auto& [o, c] : acc) {
    offsets.push_back(o);
    coeffs.push_back(c);
  }
  double sum = 0.0;
  for (std::size_t m = 0; m < kernels.size(); ++m) sum += weights[m] * kernels[m].coeff_sum();
  return StencilKernel::from_points(dims, std::move(offsets), std::move(coeffs), sum);
}

StencilKernel laplacian_kernel(int dims, int accuracy, const std::array<double, 3>& h) {
  check_dims(dims);
  std::vector<StencilKernel> parts;
  std::vector<double> weights;
  for (int axis = 0; axis < dims; ++axis) {
    parts.push_back(central_difference(2, accuracy, axis, h[static_cast<std::size_t>(axis)], dims));
    weights.push_back(1.0);
  }
  return combine(parts, weights);
}

}  // namespace stenfuse
