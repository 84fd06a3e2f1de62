#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "harnack/inequality.hpp"
#include "harnack/quadrature.hpp"

namespace {

harnack::SamplePlan moser_plan(std::uint64_t seed) {
  harnack::SamplePlan plan;
  plan.count = 20000;
  plan.seed = seed;
  plan.ranges = {{"u", {std::exp(-6.0), std::exp(6.0)}}, {"eta", {0.0, 3.0}}};
  return plan;
}

}  // namespace

TEST_CASE("discrete-gradient pairing estimate holds with the instantiated constants") {
  for (const double eps : {0.05, 0.3, 0.9}) {
    const auto rep = harnack::check_algebraic_estimate(eps, moser_plan(421));
    CHECK(rep.violations == 0);
    CHECK(rep.min_slack == 1.0);
    CHECK(rep.eps == eps);
    CHECK(rep.c2_used == doctest::Approx(1.5 * eps + 1.0 / eps).epsilon(1e-15));
  }
}

TEST_CASE("pairing estimate checked directly at hand-picked points") {
  // Re-derive both sides at a few fixed (u1, u2, eta1, eta2) and confirm the
  // sampled checker's claim independently of its sampling loop.
  const double eps = 0.5;
  const double c1 = 0.0;
  const double c2 = 1.5 * eps + 1.0 / eps;
  for (const auto& q : {std::array<double, 4>{1.0, 2.0, 0.5, 1.5},
                        {0.01, 10.0, 2.0, 0.0},
                        {3.0, 3.0, 1.0, 1.0},
                        {100.0, 0.02, 0.0, 2.5}}) {
    const double u1 = q[0], u2 = q[1], e1 = q[2], e2 = q[3];
    const double lhs = (u2 - u1) * (e1 * e1 * std::pow(u1, -eps) - e2 * e2 * std::pow(u2, -eps));
    const double grad = e1 * u1 - e2 * u2;  // weighted difference, squared below
    const double rhs = c1 * grad * grad *
                           std::min(std::pow(u1, -1.0 - eps), std::pow(u2, -1.0 - eps)) -
                       c2 * std::max(std::pow(u1, 1.0 - eps), std::pow(u2, 1.0 - eps)) *
                           (e1 - e2) * (e1 - e2);
    CHECK(lhs >= rhs - 1e-12 * std::abs(rhs));
  }
}

TEST_CASE("weighted-difference estimates hold over the sampled plan") {
  harnack::SamplePlan plan;
  plan.count = 20000;
  plan.seed = 99;
  plan.ranges = {{"t", {std::exp(-6.0), std::exp(6.0)}},
                 {"s", {std::exp(-6.0), std::exp(6.0)}},
                 {"eta", {0.0, 3.0}}};
  const auto rep = harnack::check_genaux(plan);
  CHECK(rep.violations_lower == 0);
  CHECK(rep.violations_upper == 0);
}

TEST_CASE("weighted-difference estimates checked directly at hand-picked points") {
  for (const auto& q : {std::array<double, 4>{1.0, 2.0, 0.5, 1.5},
                        {0.3, 7.0, 0.0, 2.0},
                        {5.0, 5.0, 1.3, 1.3}}) {
    const double t = q[0], s = q[1], e1 = q[2], e2 = q[3];
    const double diff2 = (t - s) * (t - s);
    const double mix = e1 * t - e2 * s;
    const double de = (e1 - e2) * (e1 - e2);
    const double sup2 = std::max(t * t, s * s);
    CHECK(std::min(e1 * e1, e2 * e2) * diff2 >= 0.5 * mix * mix - de * sup2 - 1e-12);
    CHECK(std::max(e1 * e1, e2 * e2) * diff2 <= 2.0 * mix * mix + 2.0 * de * sup2 + 1e-12);
  }
}

TEST_CASE("product rearrangement identity is exact to rounding") {
  harnack::SamplePlan plan;
  plan.count = 20000;
  plan.seed = 7;
  plan.ranges = {{"phi", {-3.0, 3.0}}, {"u", {-3.0, 3.0}}, {"xi", {-3.0, 3.0}}};
  const auto rep = harnack::check_chain_rule_identity(plan);
  CHECK(rep.scale > 0.0);
  CHECK(rep.max_abs_residual <= 1e-12 * rep.scale);
}

TEST_CASE("tail weight integral reproduces the closed form at the origin") {
  // At s = 1/2, d = 1 the integral int_{|y|>1} (1+|y|)^{-2} |y|^{-2} dy has
  // the exact value 3 - 4 ln 2 (partial fractions).
  const double exact = 3.0 - 4.0 * std::log(2.0);
  CHECK(exact == doctest::Approx(0.2274112777602188).epsilon(1e-14));
  const double got = harnack::tail_weight_integral(0.0, 0.5, 1, 1e-10);
  CHECK(std::abs(got - exact) <= 1e-9);
}

TEST_CASE("tail weight integral is symmetric and positive") {
  CHECK(harnack::tail_weight_integral(2.0, 0.5, 1, 1e-9) ==
        doctest::Approx(harnack::tail_weight_integral(-2.0, 0.5, 1, 1e-9)).epsilon(1e-10));
  CHECK(harnack::tail_weight_integral(5.0, 0.5, 1, 1e-9) > 0.0);
}

TEST_CASE("tail weight integral decays like the weight itself") {
  // (1+|x|)^{d+2s} I(x) stays within fixed bounds as x runs to 10^3. The
  // window matches the gates of the randomized suite's summary report.
  for (const double x : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
    const double scaled =
        harnack::tail_weight_integral(x, 0.5, 1, 1e-9) * std::pow(1.0 + x, 2.0);
    CHECK(scaled >= 0.2);
    CHECK(scaled <= 4.2);
  }
}

TEST_CASE("missing plan variables are reported") {
  harnack::SamplePlan plan;
  plan.count = 10;
  plan.seed = 1;
  plan.ranges = {{"u", {0.5, 2.0}}};  // "eta" absent
  CHECK_THROWS_AS(harnack::check_algebraic_estimate(0.5, plan), std::invalid_argument);
}
