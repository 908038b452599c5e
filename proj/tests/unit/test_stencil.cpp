#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "stenfuse/correlate.hpp"
#include "stenfuse/kernel.hpp"

using namespace stenfuse;

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double coeff_at(const StencilKernel& k, Offset o) {
  for (std::size_t i = 0; i < k.offsets().size(); ++i)
    if (k.offsets()[i] == o) return k.coeffs()[i];
  return 0.0;
}

}  // namespace

TEST_CASE("radius is the max Chebyshev distance") {
  std::vector<Offset> line;
  std::vector<double> cs;
  for (int j = -3; j <= 3; ++j) {
    line.push_back({j, 0, 0});
    cs.push_back(1.0);
  }
  CHECK(StencilKernel::from_points(1, line, cs).radius() == 3);

  const auto k2 = StencilKernel::from_points(2, {{0, 0, 0}, {2, 1, 0}}, {1.0, 1.0});
  CHECK(k2.radius() == 2);
  CHECK(StencilKernel::from_points(3, {{0, 0, 0}}, {1.0}).radius() == 0);
  CHECK_THROWS_AS(StencilKernel().radius(), std::invalid_argument);
}

TEST_CASE("identity kernel") {
  const auto id = identity_kernel(1);
  CHECK(id.size() == 1);
  CHECK(id.offsets()[0] == Offset{0, 0, 0});
  CHECK(id.coeffs()[0] == 1.0);
  CHECK(id.radius() == 0);
  CHECK(id.coeff_sum() == 1.0);

  PaddedField<double> f(Shape(9), 2, BoundaryPolicy::periodic());
  f.fill_random(-3, 3, 1);
  const auto out = cross_correlate(f, identity_kernel(1));
  CHECK(out.interior() == f.interior());
}

TEST_CASE("central differences match an independent linear-solve oracle") {
  for (const int deriv : {1, 2}) {
    for (const int acc : {2, 4, 6}) {
      const auto k = central_difference(deriv, acc, 0, 1.0);
      const auto oracle = testsupport::fd_coefficients_oracle(deriv, acc);
      const int r = acc / 2;
      CHECK(k.radius() == r);
      for (int j = -r; j <= r; ++j) {
        const double got = coeff_at(k, {j, 0, 0});
        CHECK(got == doctest::Approx(oracle[static_cast<std::size_t>(j + r)]).epsilon(1e-13));
      }
      CHECK(k.coeff_sum() == 0.0);  // exact, from the rational construction
    }
  }
}

TEST_CASE("known coefficient values") {
  const auto d2a2 = central_difference(2, 2, 0, 1.0);
  CHECK(coeff_at(d2a2, {-1, 0, 0}) == 1.0);
  CHECK(coeff_at(d2a2, {0, 0, 0}) == -2.0);
  CHECK(coeff_at(d2a2, {1, 0, 0}) == 1.0);

  const auto d1a2 = central_difference(1, 2, 0, 1.0);
  CHECK(coeff_at(d1a2, {-1, 0, 0}) == -0.5);
  CHECK(coeff_at(d1a2, {1, 0, 0}) == 0.5);
  CHECK(d1a2.size() == 2);  // zero center never stored

  const auto d1a6 = central_difference(1, 6, 0, 1.0);
  CHECK(coeff_at(d1a6, {-3, 0, 0}) == doctest::Approx(-1.0 / 60).epsilon(1e-15));
  CHECK(coeff_at(d1a6, {-2, 0, 0}) == doctest::Approx(3.0 / 20).epsilon(1e-15));
  CHECK(coeff_at(d1a6, {-1, 0, 0}) == doctest::Approx(-3.0 / 4).epsilon(1e-15));
  CHECK(coeff_at(d1a6, {1, 0, 0}) == doctest::Approx(3.0 / 4).epsilon(1e-15));
  CHECK(coeff_at(d1a6, {2, 0, 0}) == doctest::Approx(-3.0 / 20).epsilon(1e-15));
  CHECK(coeff_at(d1a6, {3, 0, 0}) == doctest::Approx(1.0 / 60).epsilon(1e-15));

  CHECK_THROWS_AS(central_difference(3, 2, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(central_difference(1, 3, 0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(central_difference(1, 2, 0, 0.0), std::invalid_argument);
}

TEST_CASE("mixed partial is the product of two first derivatives") {
  const auto k = mixed_partial(0, 1, 2, 1.0, 1.0);
  CHECK(k.size() == 4);
  CHECK(k.radius() == 1);
  CHECK(coeff_at(k, {1, 1, 0}) == 0.25);
  CHECK(coeff_at(k, {-1, -1, 0}) == 0.25);
  CHECK(coeff_at(k, {1, -1, 0}) == -0.25);
  CHECK(coeff_at(k, {-1, 1, 0}) == -0.25);
  CHECK(k.coeff_sum() == 0.0);
  CHECK_THROWS_AS(mixed_partial(1, 1, 2, 1.0, 1.0), std::invalid_argument);

  // Exact on bilinear fields away from boundaries.
  PaddedField<double> f(Shape(8, 8, 1), 1, BoundaryPolicy::zero());
  testsupport::fill_with(f, [](long long i, long long j, long long) {
    return static_cast<double>(i) * static_cast<double>(j);
  });
  const auto out = cross_correlate(f, k);
  CHECK(out.at(4, 4, 0) == doctest::Approx(1.0).epsilon(1e-14));

  // Constant fields are annihilated up to roundoff.
  PaddedField<double> c(Shape(8, 8, 1), 1, BoundaryPolicy::constant(3.5));
  testsupport::fill_with(c, [](long long, long long, long long) { return 3.5; });
  const auto outc = cross_correlate(c, k);
  CHECK(std::abs(outc.at(4, 4, 0)) <= 1e-15);
}

TEST_CASE("combine merges offsets with weighted coefficients") {
  // Fused 1-D diffusion at dt*alpha/h^2 = 0.1: [0.1, 0.8, 0.1].
  const double w = 0.1;
  const auto g = combine({identity_kernel(1), central_difference(2, 2, 0, 1.0, 1)}, {1.0, w});
  CHECK(g.size() == 3);
  CHECK(coeff_at(g, {-1, 0, 0}) == w);
  CHECK(coeff_at(g, {0, 0, 0}) == 1.0 + w * -2.0);
  CHECK(coeff_at(g, {1, 0, 0}) == w);
  CHECK(g.coeff_sum() == 1.0);  // identity contributes 1, derivative sums 0

  const auto k = central_difference(1, 4, 0, 2.0);
  CHECK(combine({k}, {1.0}) == k);

  const auto cancelled = combine({k, k}, {1.0, -1.0});
  CHECK(cancelled.empty());

  CHECK_THROWS_AS(combine({identity_kernel(1), identity_kernel(2)}, {1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(combine({k}, {1.0, 2.0}), std::invalid_argument);
}

TEST_CASE("laplacian kernels are cross-shaped with zero sum") {
  const auto l2 = laplacian_kernel(2, 2, {1.0, 1.0, 1.0});
  CHECK(l2.size() == 5);
  CHECK(coeff_at(l2, {0, 0, 0}) == -4.0);
  CHECK(coeff_at(l2, {1, 0, 0}) == 1.0);
  CHECK(coeff_at(l2, {0, 1, 0}) == 1.0);
  CHECK(l2.coeff_sum() == 0.0);

  const auto l3 = laplacian_kernel(3, 2, {1.0, 1.0, 1.0});
  CHECK(l3.size() == 7);
  CHECK(coeff_at(l3, {0, 0, 0}) == -6.0);

  const auto l6 = laplacian_kernel(3, 6, {1.0, 1.0, 1.0});
  CHECK(l6.size() == 3 * 6 + 1);
  CHECK(l6.radius() == 3);
  CHECK(l6.coeff_sum() == 0.0);
}

TEST_CASE("cross_correlate: direct summation example") {
  PaddedField<double> f(Shape(3), 1, BoundaryPolicy::zero());
  f.at(0, 0, 0) = 1;
  f.at(1, 0, 0) = 2;
  f.at(2, 0, 0) = 3;
  f.refresh_halo();
  const auto g =
      StencilKernel::from_points(1, {{-1, 0, 0}, {0, 0, 0}, {1, 0, 0}}, {1.0, 1.0, 1.0});
  const auto out = cross_correlate(f, g);
  CHECK(out.interior() == std::vector<double>{3, 6, 5});

  PaddedField<double> small(Shape(3), 0, BoundaryPolicy::zero());
  CHECK_THROWS_AS(cross_correlate(small, g), config_error);
}

TEST_CASE("symmetric kernels scale periodic sine modes by their symbol") {
  const long long n = 32;
  PaddedField<double> f(Shape(n), 3, BoundaryPolicy::periodic());
  testsupport::fill_with(
      f, [&](long long i, long long, long long) { return std::sin(kTwoPi * i / n); });

  const auto g = laplacian_kernel(1, 6, {1.0, 1.0, 1.0});
  // symbol of a symmetric kernel at mode k: sum_j c_j cos(2 pi j / n)
  double symbol = coeff_at(g, {0, 0, 0});
  for (int j = 1; j <= 3; ++j) symbol += 2.0 * coeff_at(g, {j, 0, 0}) * std::cos(kTwoPi * j / n);

  const auto out = cross_correlate(f, g);
  for (long long i = 0; i < n; ++i)
    CHECK(out.at(i, 0, 0) == doctest::Approx(symbol * f.at(i, 0, 0)).epsilon(1e-10));
}

TEST_CASE("linearity and distributivity within roundoff") {
  const long long n = 24;
  PaddedField<double> f(Shape(n, n, 1), 2, BoundaryPolicy::periodic());
  PaddedField<double> g(Shape(n, n, 1), 2, BoundaryPolicy::periodic());
  f.fill_random(-1, 1, 21);
  g.fill_random(-1, 1, 22);

  const auto k1 = laplacian_kernel(2, 4, {1.0, 1.0, 1.0});
  const auto k2 = mixed_partial(0, 1, 4, 1.0, 1.0);

  SUBCASE("linearity in the field argument") {
    const double a = 0.7, b = -1.3;
    PaddedField<double> combo(Shape(n, n, 1), 2, BoundaryPolicy::periodic());
    testsupport::fill_with(combo, [&](long long i, long long j, long long k) {
      return a * f.at(i, j, k) + b * g.at(i, j, k);
    });
    const auto lhs = cross_correlate(combo, k1);
    const auto rf = cross_correlate(f, k1);
    const auto rg = cross_correlate(g, k1);
    double scale = 0;
    for (const double v : combo.interior()) scale = std::max(scale, std::abs(v));
    for (long long j = 0; j < n; ++j)
      for (long long i = 0; i < n; ++i) {
        const double rhs = a * rf.at(i, j, 0) + b * rg.at(i, j, 0);
        // |diff| <= 4 eps ||.||_inf scaled by the kernel's weight mass
        CHECK(std::abs(lhs.at(i, j, 0) - rhs) <= 64 * 2.3e-16 * std::max(1.0, scale) * 16);
      }
  }

  SUBCASE("distributivity over kernel combination (fused == two passes)") {
    const double w1 = 1.0, w2 = 0.35;
    const auto fused = combine({k1, k2}, {w1, w2});
    const auto lhs = cross_correlate(f, fused);
    const auto r1 = cross_correlate(f, k1);
    const auto r2 = cross_correlate(f, k2);
    for (long long j = 0; j < n; ++j)
      for (long long i = 0; i < n; ++i) {
        const double rhs = w1 * r1.at(i, j, 0) + w2 * r2.at(i, j, 0);
        CHECK(lhs.at(i, j, 0) == doctest::Approx(rhs).epsilon(1e-12));
      }
  }
}

TEST_CASE("polynomial exactness of central differences") {
  // accuracy-p derivative of x^q is exact for q <= p + deriv - 1
  const long long n = 16;
  const double h = 0.5;
  for (const int acc : {2, 4, 6}) {
    for (const int deriv : {1, 2}) {
      const int qmax = acc + deriv - 1;
      for (int q = 0; q <= qmax; ++q) {
        PaddedField<double> f(Shape(n), 3, BoundaryPolicy::zero());
        testsupport::fill_with(
            f, [&](long long i, long long, long long) { return std::pow(i * h, q); });
        const auto k = central_difference(deriv, acc, 0, h);
        const auto out = cross_correlate(f, k);
        const long long i = n / 2;
        const double x = i * h;
        double expect = 0;
        if (deriv == 1) expect = q == 0 ? 0.0 : q * std::pow(x, q - 1);
        if (deriv == 2) expect = q <= 1 ? 0.0 : q * (q - 1) * std::pow(x, q - 2);
        const double scale = std::max(1.0, std::pow(x + 3 * h, q) / (h * h));
        CHECK(std::abs(out.at(i, 0, 0) - expect) <= 16 * 2.3e-16 * scale);
      }
    }
  }
}

TEST_CASE("accuracy-6 first derivative converges at 6th order") {
  double prev_err = 0;
  std::vector<double> errs;
  for (const long long n : {32LL, 64LL, 128LL}) {
    const double h = kTwoPi / n;
    PaddedField<double> f(Shape(n), 3, BoundaryPolicy::periodic());
    testsupport::fill_with(f,
                           [&](long long i, long long, long long) { return std::sin(i * h); });
    const auto k = central_difference(1, 6, 0, h);
    const auto out = cross_correlate(f, k);
    double err = 0;
    for (long long i = 0; i < n; ++i)
      err = std::max(err, std::abs(out.at(i, 0, 0) - std::cos(i * h)));
    errs.push_back(err);
    prev_err = err;
  }
  (void)prev_err;
  const double r1 = errs[0] / errs[1];
  const double r2 = errs[1] / errs[2];
  CHECK(r1 >= 64.0 * 0.85);
  CHECK(r1 <= 64.0 * 1.15);
  CHECK(r2 >= 64.0 * 0.85);
  CHECK(r2 <= 64.0 * 1.15);
}

TEST_CASE("accumulation order is fixed: offsets iterate in scan order") {
  // Construction order must not affect the stored order.
  const auto a = StencilKernel::from_points(1, {{1, 0, 0}, {-1, 0, 0}}, {2.0, 1.0});
  const auto b = StencilKernel::from_points(1, {{-1, 0, 0}, {1, 0, 0}}, {1.0, 2.0});
  CHECK(a == b);
  CHECK(a.offsets()[0] == Offset{-1, 0, 0});
}
