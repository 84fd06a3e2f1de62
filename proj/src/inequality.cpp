#include "harnack/inequality.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "harnack/quadrature.hpp"

namespace harnack {

namespace {

/// Relative guard for "holds in exact arithmetic" comparisons.
constexpr double kRelGuard = 1e-12;

}  // namespace

AlgebraicEstimateReport check_algebraic_estimate(double eps, const SamplePlan& plan) {
  if (!(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("check_algebraic_estimate: eps must lie in (0,1)");
  }
  const Interval u_range = plan.range("u");
  const Interval eta_range = plan.range("eta");
  if (!(u_range.lo > 0.0)) {
    throw std::invalid_argument("check_algebraic_estimate: range 'u' must be strictly positive");
  }
  if (eta_range.lo < 0.0) {
    throw std::invalid_argument("check_algebraic_estimate: range 'eta' must be nonnegative");
  }

  const double delta = eps / 4.0;
  AlgebraicEstimateReport report;
  report.eps = eps;
  report.c1_used = eps / 2.0 - 2.0 * delta;          // = 0 exactly for binary doubles
  report.c2_used = 2.0 * delta + 1.0 / (4.0 * delta) + eps;  // Young constant c(delta)=1/(4 delta)

  SampleRng rng(plan.seed);
  double worst_slack = 1.0;
  for (std::uint64_t k = 0; k < plan.count; ++k) {
    const double ux = rng.log_uniform(u_range.lo, u_range.hi);
    const double uy = rng.log_uniform(u_range.lo, u_range.hi);
    const double ex = rng.uniform(eta_range.lo, eta_range.hi);
    const double ey = rng.uniform(eta_range.lo, eta_range.hi);

    const double lhs = (uy - ux) * (ex * ex * std::pow(ux, -eps) - ey * ey * std::pow(uy, -eps));
    const double grad = ex * ux - ey * uy;
    const double a_term =
        grad * grad * std::min(std::pow(ux, -eps - 1.0), std::pow(uy, -eps - 1.0));
    const double b_term =
        std::max(std::pow(ux, 1.0 - eps), std::pow(uy, 1.0 - eps)) * (ex - ey) * (ex - ey);
    const double rhs = report.c1_used * a_term - report.c2_used * b_term;

    const double scale = std::max({1.0, std::abs(lhs), report.c1_used * a_term,
                                   report.c2_used * b_term});
    if (lhs < rhs - kRelGuard * scale) {
      ++report.violations;
      const double denom = report.c2_used * b_term;
      const double needed =
          denom > 0.0 ? (report.c1_used * a_term - lhs) / denom : 1e300;
      worst_slack = std::max(worst_slack, needed);
    }
  }
  report.min_slack = worst_slack;
  return report;
}

GenauxReport check_genaux(const SamplePlan& plan) {
  const Interval t_range = plan.range("t");
  const Interval s_range = plan.range("s");
  const Interval eta_range = plan.range("eta");
  if (!(t_range.lo > 0.0) || !(s_range.lo > 0.0)) {
    throw std::invalid_argument("check_genaux: ranges 't' and 's' must be strictly positive");
  }
  if (eta_range.lo < 0.0) {
    throw std::invalid_argument("check_genaux: range 'eta' must be nonnegative");
  }

  GenauxReport report;
  SampleRng rng(plan.seed);
  for (std::uint64_t k = 0; k < plan.count; ++k) {
    const double t = rng.log_uniform(t_range.lo, t_range.hi);
    const double s = rng.log_uniform(s_range.lo, s_range.hi);
    const double e1 = rng.uniform(eta_range.lo, eta_range.hi);
    const double e2 = rng.uniform(eta_range.lo, eta_range.hi);

    const double diff2 = (t - s) * (t - s);
    const double mixed2 = (e1 * t - e2 * s) * (e1 * t - e2 * s);
    const double eta_diff2 = (e1 - e2) * (e1 - e2);
    const double max_ts2 = std::max(t * t, s * s);

    const double lower_lhs = std::min(e1 * e1, e2 * e2) * diff2;
    const double lower_rhs = 0.5 * mixed2 - eta_diff2 * max_ts2;
    double scale = std::max({1.0, lower_lhs, std::abs(lower_rhs)});
    if (lower_lhs < lower_rhs - kRelGuard * scale) ++report.violations_lower;

    const double upper_lhs = std::max(e1 * e1, e2 * e2) * diff2;
    const double upper_rhs = 2.0 * mixed2 + 2.0 * eta_diff2 * max_ts2;
    scale = std::max({1.0, upper_lhs, upper_rhs});
    if (upper_lhs > upper_rhs + kRelGuard * scale) ++report.violations_upper;
  }
  return report;
}

double tail_weight_integral(double x, double s, int dim, double tol) {
  if (dim != 1) {
    throw std::invalid_argument("tail_weight_integral: only dim == 1 is supported");
  }
  if (!(s > 0.0 && s < 1.0)) {
    throw std::invalid_argument("tail_weight_integral: s must lie in (0,1)");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("tail_weight_integral: tol must be positive");
  }
  const double power = 1.0 + 2.0 * s;  // d + 2s with d = 1
  const double xa = std::abs(x);

  // One half-line at a time:  int_1^inf (1+|c-y|)^{-power} y^{-power} dy,
  // where c = xa covers y > 1 and c = -xa covers y < -1 after y -> -y.
  const auto half_line = [&](double c, double piece_tol) {
    const auto f = [&](double y) {
      return std::pow(1.0 + std::abs(c - y), -power) * std::pow(y, -power);
    };
    // Bounded pieces split where the integrand changes analytic form (the
    // kink at y = c) and at the envelope breakpoint y = 2|c|; tail mapped to
    // a bounded interval by y -> 1/y.
    std::vector<double> cuts = {1.0};
    if (c > 1.0) cuts.push_back(c);
    if (2.0 * std::abs(c) > 1.0) cuts.push_back(2.0 * std::abs(c));
    std::sort(cuts.begin(), cuts.end());
    const double split_tol = piece_tol / static_cast<double>(cuts.size() + 1);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      total += integrate(f, cuts[i], cuts[i + 1], split_tol);
    }
    total += integrate_tail(f, cuts.back(), split_tol);
    return total;
  };

  return half_line(xa, tol / 2.0) + half_line(-xa, tol / 2.0);
}

ChainRuleReport check_chain_rule_identity(const SamplePlan& plan) {
  const Interval phi_range = plan.range("phi");
  const Interval u_range = plan.range("u");
  const Interval xi_range = plan.range("xi");

  ChainRuleReport report;
  SampleRng rng(plan.seed);
  for (std::uint64_t k = 0; k < plan.count; ++k) {
    const double p1 = rng.uniform(phi_range.lo, phi_range.hi);
    const double p2 = rng.uniform(phi_range.lo, phi_range.hi);
    const double u1 = rng.uniform(u_range.lo, u_range.hi);
    const double u2 = rng.uniform(u_range.lo, u_range.hi);
    const double x1 = rng.uniform(xi_range.lo, xi_range.hi);
    const double x2 = rng.uniform(xi_range.lo, xi_range.hi);

    const double lhs = (p1 - p2) * (u1 * x1 - u2 * x2);
    const double rhs_sym = 0.5 * (p1 - p2) * (u1 - u2) * (x1 + x2) +
                           0.5 * (p1 - p2) * (u1 + u2) * (x1 - x2);
    const double rhs_swap = (u1 - u2) * (p1 * x1 - p2 * x2) -
                            0.5 * (u1 - u2) * (x1 - x2) * (p1 + p2) +
                            0.5 * (p1 - p2) * (u1 + u2) * (x1 - x2);

    const double residual = std::max(std::abs(lhs - rhs_sym), std::abs(lhs - rhs_swap));
    const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs_sym), std::abs(rhs_swap)});
    report.max_abs_residual = std::max(report.max_abs_residual, residual);
    report.scale = std::max(report.scale, scale);
  }
  return report;
}

}  // namespace harnack
