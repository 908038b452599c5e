#pragma once

#include <string>
#include <vector>

#include "stenfuse/boundary.hpp"
#include "stenfuse/common.hpp"
#include "stenfuse/rng.hpp"
#include "stenfuse/shape.hpp"

namespace stenfuse {

// A d-dimensional scalar array padded with a halo of radius r on every
// axis, stored as one allocation in row-wise scan order. The halo holds
// boundary values defined by the policy; refresh_halo() re-derives them
// from the current interior.
template <typename T>
class PaddedField {
 public:
  PaddedField() = default;
  PaddedField(Shape shape, int halo, BoundaryPolicy policy)
      : shape_(shape), halo_(halo), policy_(policy) {
    if (halo < 0) throw std::invalid_argument("PaddedField: halo must be >= 0");
    sx_ = 1;
    sy_ = shape_.nx + 2 * halo_;
    sz_ = sy_ * (shape_.ny + 2 * halo_);
    data_.assign(static_cast<std::size_t>(sz_ * (shape_.nz + 2 * halo_)), T(0));
  }

  const Shape& shape() const { return shape_; }
  int halo() const { return halo_; }
  const BoundaryPolicy& policy() const { return policy_; }
  long long padded_count() const { return static_cast<long long>(data_.size()); }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  long long stride_y() const { return sy_; }
  long long stride_z() const { return sz_; }

  // Index into the padded allocation; coordinates are interior-relative
  // and may range over [-halo, n + halo).
  long long offset(long long i, long long j, long long k) const {
    return (i + halo_) + (j + halo_) * sy_ + (k + halo_) * sz_;
  }

  T& at(long long i, long long j, long long k) { return data_[offset(i, j, k)]; }
  const T& at(long long i, long long j, long long k) const { return data_[offset(i, j, k)]; }

  // Boundary value function for an out-of-domain index.
  T boundary_value(long long i, long long j, long long k) const {
    switch (policy_.kind) {
      case BoundaryPolicy::Kind::Zero: return T(0);
      case BoundaryPolicy::Kind::Constant: return static_cast<T>(policy_.value);
      case BoundaryPolicy::Kind::Periodic:
        return at(wrap(i, shape_.nx), wrap(j, shape_.ny), wrap(k, shape_.nz));
    }
    return T(0);
  }

  // Fill every halo cell from the boundary policy. Idempotent; the
  // interior is never touched.
  void refresh_halo() {
    instrument::halo_refreshes.fetch_add(1, std::memory_order_relaxed);
    if (halo_ == 0) return;
    const long long r = halo_;
    for (long long k = -r; k < shape_.nz + r; ++k) {
      const bool zk = k < 0 || k >= shape_.nz;
      for (long long j = -r; j < shape_.ny + r; ++j) {
        const bool zj = j < 0 || j >= shape_.ny;
        for (long long i = -r; i < shape_.nx + r; ++i) {
          if (!zk && !zj && i >= 0 && i < shape_.nx) continue;
          data_[offset(i, j, k)] = boundary_value(i, j, k);
        }
      }
    }
  }

  // Deterministic interior fill, uniform in [lo, hi]; `stream`
  // distinguishes fields sharing one seed. Refreshes the halo afterward.
  void fill_random(double lo, double hi, std::uint64_t seed, std::uint64_t stream = 0) {
    if (lo > hi) throw std::invalid_argument("fill_random: lo > hi");
    const std::uint64_t key = rng::stream_key(seed, stream);
    std::uint64_t m = 0;
    for (long long k = 0; k < shape_.nz; ++k)
      for (long long j = 0; j < shape_.ny; ++j)
        for (long long i = 0; i < shape_.nx; ++i)
          data_[offset(i, j, k)] = static_cast<T>(rng::uniform(key, m++, lo, hi));
    refresh_halo();
  }

  void fill(T v) {
    for (auto& x : data_) x = v;
  }

  // Interior values in scan order (copy; used by verification).
  std::vector<T> interior() const {
    std::vector<T> out;
    out.reserve(static_cast<std::size_t>(shape_.count()));
    for (long long k = 0; k < shape_.nz; ++k)
      for (long long j = 0; j < shape_.ny; ++j)
        for (long long i = 0; i < shape_.nx; ++i)
          out.push_back(data_[offset(i, j, k)]);
    return out;
  }

  friend bool operator==(const PaddedField& a, const PaddedField& b) {
    return a.shape_ == b.shape_ && a.halo_ == b.halo_ && a.data_ == b.data_;
  }

 private:
  static long long wrap(long long i, long long n) {
    long long m = i % n;
    return m < 0 ? m + n : m;
  }

  Shape shape_{};
  int halo_ = 0;
  BoundaryPolicy policy_{};
  long long sx_ = 1, sy_ = 1, sz_ = 1;
  std::vector<T> data_;
};

// An ordered set of fields sharing shape, halo and dtype; the columns of
// the state matrix in multi-field problems.
template <typename T>
class FieldSet {
 public:
  FieldSet() = default;
  FieldSet(Shape shape, int halo, BoundaryPolicy policy, std::vector<std::string> names)
      : names_(std::move(names)) {
    fields_.reserve(names_.size());
    for (std::size_t f = 0; f < names_.size(); ++f) fields_.emplace_back(shape, halo, policy);
  }

  int count() const { return static_cast<int>(fields_.size()); }
  const Shape& shape() const { return fields_.at(0).shape(); }
  int halo() const { return fields_.at(0).halo(); }

  PaddedField<T>& field(int f) { return fields_.at(static_cast<std::size_t>(f)); }
  const PaddedField<T>& field(int f) const { return fields_.at(static_cast<std::size_t>(f)); }
  const std::string& name(int f) const { return names_.at(static_cast<std::size_t>(f)); }
  const std::vector<std::string>& names() const { return names_; }

  void refresh_halos() {
    for (auto& f : fields_) f.refresh_halo();
  }

  void fill_random(double lo, double hi, std::uint64_t seed) {
    for (std::size_t f = 0; f < fields_.size(); ++f)
      fields_[f].fill_random(lo, hi, seed, f);
  }

  long long interior_bytes() const {
    return static_cast<long long>(fields_.size()) * shape().count() *
           static_cast<long long>(sizeof(T));
  }

  friend bool operator==(const FieldSet& a, const FieldSet& b) {
    return a.fields_ == b.fields_;
  }

 private:
  std::vector<PaddedField<T>> fields_;
  std::vector<std::string> names_;
};

}  // namespace stenfuse
