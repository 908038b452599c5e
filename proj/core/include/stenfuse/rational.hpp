#pragma once

#include <cstdint>
#include <stdexcept>

namespace stenfuse {

// Small exact rational used to solve finite-difference moment systems
// without solver noise. Magnitudes stay tiny for the supported orders;
// overflow throws rather than silently wrapping.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  Rational() = default;
  Rational(std::int64_t n) : num(n), den(1) {}
  Rational(std::int64_t n, std::int64_t d);

  static Rational zero() { return {}; }
  bool is_zero() const { return num == 0; }

  double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }

  Rational operator-() const;
  friend Rational operator+(const Rational& a, const Rational& b);
  friend Rational operator-(const Rational& a, const Rational& b);
  friend Rational operator*(const Rational& a, const Rational& b);
  friend Rational operator/(const Rational& a, const Rational& b);
  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num == b.num && a.den == b.den;
  }
};

}  // namespace stenfuse
