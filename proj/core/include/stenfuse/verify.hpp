#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>

#include "stenfuse/common.hpp"

namespace stenfuse {

struct VerifyResult {
  bool pass = true;
  long long first_index = -1;
  double a = 0, b = 0;
  std::uint64_t ulp = 0;

  explicit operator bool() const { return pass; }
};

namespace detail {
inline std::int64_t lex_order(double x) {
  const auto i = std::bit_cast<std::int64_t>(x);
  return i < 0 ? std::numeric_limits<std::int64_t>::min() - i : i;
}
inline std::int64_t lex_order(float x) {
  const auto i = static_cast<std::int64_t>(std::bit_cast<std::int32_t>(x));
  return i < 0 ? std::numeric_limits<std::int32_t>::min() - i : i;
}
}  // namespace detail

// Distance in representable steps. NaN anywhere compares as the maximum
// distance; +0 and -0 are 0 apart.
template <typename T>
std::uint64_t ulp_distance(T a, T b) {
  if (std::isnan(a) || std::isnan(b)) return std::numeric_limits<std::uint64_t>::max();
  const std::int64_t ia = detail::lex_order(a);
  const std::int64_t ib = detail::lex_order(b);
  return ia >= ib ? static_cast<std::uint64_t>(ia - ib) : static_cast<std::uint64_t>(ib - ia);
}

// |a - b| <= c + c|b| element-wise.
template <typename T>
VerifyResult verify_allclose(std::span<const T> a, std::span<const T> b, double c) {
  if (a.size() != b.size()) throw std::invalid_argument("verify_allclose: shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double av = a[i], bv = b[i];
    const double lhs = std::abs(av - bv);
    if (!(lhs <= c + c * std::abs(bv))) {
      VerifyResult r;
      r.pass = false;
      r.first_index = static_cast<long long>(i);
      r.a = av;
      r.b = bv;
      return r;
    }
  }
  return {};
}

// Per element: ULP distance < max_ulp, or |a-b| < abs_floor.
template <typename T>
VerifyResult verify_ulp(std::span<const T> a, std::span<const T> b, std::uint64_t max_ulp,
                        double abs_floor) {
  if (a.size() != b.size()) throw std::invalid_argument("verify_ulp: shape mismatch");
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::uint64_t d = ulp_distance(a[i], b[i]);
    if (d < max_ulp) continue;
    if (std::abs(static_cast<double>(a[i]) - static_cast<double>(b[i])) < abs_floor) continue;
    VerifyResult r;
    r.pass = false;
    r.first_index = static_cast<long long>(i);
    r.a = a[i];
    r.b = b[i];
    r.ulp = d;
    return r;
  }
  return {};
}

// Default absolute floor of the ULP criterion: machine epsilon times the
// smallest reference value.
template <typename T>
double default_abs_floor(std::span<const T> reference) {
  if (reference.empty()) return 0.0;
  double mn = reference[0];
  for (const T v : reference) mn = std::min(mn, static_cast<double>(v));
  return static_cast<double>(std::numeric_limits<T>::epsilon()) * mn;
}

// Compensated (Neumaier) sum; used where conservation checks need the
// measurement error well below the tolerance being asserted.
template <typename T>
double compensated_sum(std::span<const T> xs) {
  double s = 0.0, c = 0.0;
  for (const T xv : xs) {
    const double x = static_cast<double>(xv);
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  }
  return s + c;
}

}  // namespace stenfuse
