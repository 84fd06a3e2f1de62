#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "harnack/quadrature.hpp"

using harnack::integrate;
using harnack::integrate_tail;

TEST_CASE("simpson rule reproduces cubics exactly") {
  // Adaptive Simpson is exact on polynomials of degree <= 3, so the answer
  // must match the antiderivative to rounding, not merely to tolerance.
  const auto f = [](double x) { return ((2.0 * x - 3.0) * x + 1.0) * x - 4.0; };
  const auto F = [](double x) {
    return ((0.5 * x - 1.0) * x + 0.5) * x * x - 4.0 * x;
  };
  const double exact = F(2.5) - F(-1.0);
  CHECK(integrate(f, -1.0, 2.5, 1e-8) == doctest::Approx(exact).epsilon(1e-14));
}

TEST_CASE("smooth integrands meet the requested absolute tolerance") {
  const double exact = std::cos(0.0) - std::cos(2.0);  // integral of sin on [0, 2]
  for (const double tol : {1e-6, 1e-10, 1e-12}) {
    const double got = integrate([](double x) { return std::sin(x); }, 0.0, 2.0, tol);
    CHECK(std::abs(got - exact) <= tol);
  }
}

TEST_CASE("integration over an empty interval is zero") {
  CHECK(integrate([](double x) { return x * x; }, 1.0, 1.0, 1e-10) == 0.0);
}

TEST_CASE("nonpositive tolerance is rejected") {
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(integrate([](double) { return 1.0; }, 0.0, 1.0, -1e-8),
                  std::invalid_argument);
}

TEST_CASE("a jump discontinuity converges instead of exhausting the recursion") {
  // The error estimate of the panel containing a jump shrinks only like the
  // panel width; the floored per-panel budget must still terminate and the
  // value must come out correct to a modest multiple of the tolerance.
  const double c = 1.0 / 3.0;  // jump located off every dyadic split point
  const auto f = [&](double x) { return x < c ? 1.0 : 3.0; };
  const double exact = c + 3.0 * (1.0 - c);
  const double tol = 1e-9;
  const double got = integrate(f, 0.0, 1.0, tol);
  CHECK(std::abs(got - exact) <= 100.0 * tol);
}

TEST_CASE("tail integral of an inverse square is exact in the mapped variable") {
  // 1/r^2 maps to a constant under r = 1/u, so the substituted Simpson rule
  // is exact: int_a^inf r^{-2} dr = 1/a.
  for (const double a : {0.5, 1.0, 40.0}) {
    const double got = integrate_tail([](double r) { return 1.0 / (r * r); }, a, 1e-12);
    CHECK(got == doctest::Approx(1.0 / a).epsilon(1e-13));
  }
}

TEST_CASE("tail integral handles steeper power decay") {
  // int_2^inf r^{-5/2} dr = (2/3) 2^{-3/2}; the mapped integrand u^{1/2} has
  // a square-root endpoint, the roughest profile the kernels produce.
  const double got =
      integrate_tail([](double r) { return std::pow(r, -2.5); }, 2.0, 1e-11);
  CHECK(got == doctest::Approx((2.0 / 3.0) * std::pow(2.0, -1.5)).epsilon(1e-9));
}

TEST_CASE("tail integral of the kernel-times-weight profile matches closed form") {
  // int_L^inf r^{-2} (L/r)^2 dr = 1/(3L): the matched-decay closure integrand
  // shape used by the truncated-global operator rows.
  const double L = 40.0;
  const auto f = [&](double r) { return (1.0 / (r * r)) * std::pow(L / r, 2.0); };
  CHECK(integrate_tail(f, L, 1e-12) == doctest::Approx(1.0 / (3.0 * L)).epsilon(1e-10));
}
