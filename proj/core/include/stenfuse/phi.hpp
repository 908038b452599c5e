#pragma once

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "stenfuse/common.hpp"

namespace stenfuse {

// Reference to one entry of the linear-stage output Q (row = kernel,
// field = input array).
struct QRef {
  int row = 0;
  int field = 0;
  friend bool operator==(const QRef&, const QRef&) = default;
  friend bool operator<(const QRef& a, const QRef& b) {
    return a.row != b.row ? a.row < b.row : a.field < b.field;
  }
};

// Nonlinear output stage: maps the per-point Q matrix (n_s x n_f) to the
// updated values of all output fields at that point. Implementations
// declare which Q entries they read so unused linear work can be pruned.
class PointPhi {
 public:
  virtual ~PointPhi() = default;

  virtual int n_outputs() const = 0;
  virtual void eval(const double* q, int ns, int nf, Coord center, double* out) const = 0;
  virtual void eval(const float* q, int ns, int nf, Coord center, float* out) const = 0;
  virtual std::vector<QRef> used_entries(int output) const = 0;

  // Rough per-point FLOP count of the nonlinear stage, for operational
  // intensity estimates.
  virtual double flops_per_point() const = 0;
  virtual std::string name() const = 0;
};

// out[j] = Q[row][j]: forwards one linear row per field, which makes a
// one-row fused kernel equivalent to a plain cross-correlation.
class PassThroughPhi final : public PointPhi {
 public:
  PassThroughPhi(int row, int n_fields) : row_(row), nf_(n_fields) {}

  int n_outputs() const override { return nf_; }
  void eval(const double* q, int ns, int nf, Coord, double* out) const override {
    fwd(q, ns, nf, out);
  }
  void eval(const float* q, int ns, int nf, Coord, float* out) const override {
    fwd(q, ns, nf, out);
  }
  std::vector<QRef> used_entries(int output) const override { return {{row_, output}}; }
  double flops_per_point() const override { return 0.0; }
  std::string name() const override { return "pass-through"; }

 private:
  template <typename T>
  void fwd(const T* q, int, int nf, T* out) const {
    for (int j = 0; j < nf_; ++j) out[j] = q[row_ * nf + j];
  }
  int row_;
  int nf_;
};

// out[j] = max over all rows of Q[.][j]. Paired with an identity-shifted
// coefficient matrix this computes a sliding max filter.
class MaxFilterPhi final : public PointPhi {
 public:
  MaxFilterPhi(int n_rows, int n_fields) : ns_(n_rows), nf_(n_fields) {}

  int n_outputs() const override { return nf_; }
  void eval(const double* q, int ns, int nf, Coord, double* out) const override {
    fwd(q, ns, nf, out);
  }
  void eval(const float* q, int ns, int nf, Coord, float* out) const override {
    fwd(q, ns, nf, out);
  }
  std::vector<QRef> used_entries(int output) const override {
    std::vector<QRef> refs;
    refs.reserve(static_cast<std::size_t>(ns_));
    for (int i = 0; i < ns_; ++i) refs.push_back({i, output});
    return refs;
  }
  double flops_per_point() const override { return static_cast<double>(ns_ - 1) * nf_; }
  std::string name() const override { return "max-filter"; }

 private:
  template <typename T>
  void fwd(const T* q, int, int nf, T* out) const {
    for (int j = 0; j < nf_; ++j) {
      T m = q[j];
      for (int i = 1; i < ns_; ++i) m = std::max(m, q[i * nf + j]);
      out[j] = m;
    }
  }
  int ns_;
  int nf_;
};

}  // namespace stenfuse
