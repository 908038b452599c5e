#pragma once

// Independent reference implementations used only by tests. These stay
// deliberately naive and separate from the library code paths they check.

#include <cmath>
#include <cstring>
#include <functional>
#include <stdexcept>
#include <vector>

#include "stenfuse/field.hpp"
#include "stenfuse/shape.hpp"

namespace testsupport {

// Plain triple-loop matrix product with the same k-outer accumulation
// order as the engine's linear stage.
inline std::vector<double> naive_matmul_korder(const std::vector<double>& a, int ns, int nk,
                                               const std::vector<double>& b, int nf) {
  std::vector<double> q(static_cast<std::size_t>(ns) * nf, 0.0);
  for (int k = 0; k < nk; ++k)
    for (int i = 0; i < ns; ++i)
      for (int j = 0; j < nf; ++j)
        q[static_cast<std::size_t>(i) * nf + j] +=
            a[static_cast<std::size_t>(i) * nk + k] * b[static_cast<std::size_t>(k) * nf + j];
  return q;
}

// Solves the central-difference moment system in plain double-precision
// Gaussian elimination with partial pivoting: an oracle independent of
// the library's exact-rational solver. Returns 2r+1 coefficients for
// offsets -r..r at unit spacing.
inline std::vector<double> fd_coefficients_oracle(int deriv, int accuracy) {
  const int r = accuracy / 2;
  const int n = 2 * r + 1;
  std::vector<std::vector<double>> m(n, std::vector<double>(n + 1, 0.0));
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) m[row][col] = std::pow(col - r, row);
    double fact = 1.0;
    for (int e = 2; e <= row; ++e) fact *= e;
    m[row][n] = row == deriv ? fact : 0.0;
  }
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int row = col + 1; row < n; ++row)
      if (std::abs(m[row][col]) > std::abs(m[piv][col])) piv = row;
    std::swap(m[col], m[piv]);
    for (int row = 0; row < n; ++row) {
      if (row == col) continue;
      const double f = m[row][col] / m[col][col];
      for (int c2 = col; c2 <= n; ++c2) m[row][c2] -= f * m[col][c2];
    }
  }
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = m[i][n] / m[i][i];
  return out;
}

// Brute-force sliding max over the (2r+1)^d box, reading the padded array.
template <typename T>
stenfuse::PaddedField<T> sliding_max_oracle(const stenfuse::PaddedField<T>& f, int r, int dims) {
  stenfuse::PaddedField<T> out(f.shape(), f.halo(), f.policy());
  const stenfuse::Shape& sh = f.shape();
  const int zr = dims == 3 ? r : 0, yr = dims >= 2 ? r : 0;
  for (long long k = 0; k < sh.nz; ++k)
    for (long long j = 0; j < sh.ny; ++j)
      for (long long i = 0; i < sh.nx; ++i) {
        T m = f.at(i - r, j - yr, k - zr);
        for (int sz = -zr; sz <= zr; ++sz)
          for (int sy = -yr; sy <= yr; ++sy)
            for (int sx = -r; sx <= r; ++sx) m = std::max(m, f.at(i + sx, j + sy, k + sz));
        out.at(i, j, k) = m;
      }
  return out;
}

// Deterministic fake clock: returns the queued instants in order.
class FakeClock {
 public:
  explicit FakeClock(std::vector<double> instants) : instants_(std::move(instants)) {}

  double operator()() {
    if (next_ >= instants_.size()) throw std::logic_error("FakeClock exhausted");
    return instants_[next_++];
  }

  // Instants such that the i-th start/stop pair spans durations[i].
  static std::vector<double> from_durations(const std::vector<double>& durations) {
    std::vector<double> instants;
    double t = 0;
    for (const double d : durations) {
      instants.push_back(t);
      t += d;
      instants.push_back(t);
      t += 0.5;  // arbitrary gap between iterations
    }
    return instants;
  }

 private:
  std::vector<double> instants_;
  std::size_t next_ = 0;
};

template <typename T, typename Fn>
void fill_with(stenfuse::PaddedField<T>& f, Fn&& fn) {
  const stenfuse::Shape& sh = f.shape();
  for (long long k = 0; k < sh.nz; ++k)
    for (long long j = 0; j < sh.ny; ++j)
      for (long long i = 0; i < sh.nx; ++i) f.at(i, j, k) = static_cast<T>(fn(i, j, k));
  f.refresh_halo();
}

template <typename T>
bool bitwise_equal(const stenfuse::FieldSet<T>& a, const stenfuse::FieldSet<T>& b) {
  if (a.count() != b.count()) return false;
  for (int f = 0; f < a.count(); ++f) {
    const auto va = a.field(f).interior();
    const auto vb = b.field(f).interior();
    if (va.size() != vb.size()) return false;
    for (std::size_t i = 0; i < va.size(); ++i) {
      // bit-level equality, distinguishing signed zeros and NaNs
      if (std::memcmp(&va[i], &vb[i], sizeof(T)) != 0) return false;
    }
  }
  return true;
}

}  // namespace testsupport
