#include "stenfuse/rational.hpp"

#include <numeric>

namespace stenfuse {
namespace {

std::int64_t checked(__int128 v, const char* what) {
  if (v > INT64_MAX || v < INT64_MIN)
    throw std::overflow_error(std::string("Rational overflow in ") + what);
  return static_cast<std::int64_t>(v);
}

Rational make(__int128 n, __int128 d, const char* what) {
  if (d == 0) throw std::domain_error("Rational: zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 a = n < 0 ? -n : n;
  __int128 g = 1;
  {
    __int128 x = a, y = d;
    while (y != 0) {
      __int128 t = x % y;
      x = y;
      y = t;
    }
    g = x == 0 ? 1 : x;
  }
  Rational r;
  r.num = checked(n / g, what);
  r.den = checked(d / g, what);
  return r;
}

}  // namespace

Rational::Rational(std::int64_t n, std::int64_t d) { *this = make(n, d, "ctor"); }

Rational Rational::operator-() const {
  Rational r = *this;
  r.num = -r.num;
  return r;
}

Rational operator+(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.den + static_cast<__int128>(b.num) * a.den,
              static_cast<__int128>(a.den) * b.den, "add");
}

Rational operator-(const Rational& a, const Rational& b) { return a + (-b); }

Rational operator*(const Rational& a, const Rational& b) {
  return make(static_cast<__int128>(a.num) * b.num, static_cast<__int128>(a.den) * b.den, "mul");
}

Rational operator/(const Rational& a, const Rational& b) {
  if (b.is_zero()) throw std::domain_error("Rational: division by zero");
  return make(static_cast<__int128>(a.num) * b.den, static_cast<__int128>(a.den) * b.num, "div");
}

}  // namespace stenfuse
