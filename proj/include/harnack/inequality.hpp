#pragma once

#include <cstdint>

#include "harnack/sampling.hpp"

/// Randomized verification of the self-contained algebraic and integral
/// estimates the Harnack machinery rests on.
namespace harnack {

struct AlgebraicEstimateReport {
  double eps = 0.0;
  double c1_used = 0.0;
  double c2_used = 0.0;
  std::uint64_t violations = 0;
  /// Smallest multiplicative slack on c2 that would repair all observed
  /// violations (1.0 when there are none) — reported instead of failing
  /// silently if the instantiated constants ever prove too small.
  double min_slack = 1.0;
};

/// Discrete-gradient lower bound for the Moser-iteration test pairing
///   (u(y)-u(x)) (eta^2 u^{-eps}(x) - eta^2 u^{-eps}(y))
///     >= c1 (eta u(x) - eta u(y))^2 (u^{-1-eps}(x) AND-min u^{-1-eps}(y))
///        - c2 (u^{1-eps}(x) OR-max u^{1-eps}(y)) (eta(x)-eta(y))^2 ,
/// checked with the constants the underlying proof constructs at delta =
/// eps/4 (Young constant c(delta) = 1/(4 delta)): c1 = eps/2 - 2 delta = 0,
/// c2 = 2 delta + c(delta) + eps = 3 eps/2 + 1/eps.
/// Plan variables: "u" (positive, sampled log-uniformly) and "eta" (>= 0).
AlgebraicEstimateReport check_algebraic_estimate(double eps, const SamplePlan& plan);

struct GenauxReport {
  std::uint64_t violations_lower = 0;  ///< (min eta)^2 (t-s)^2 >= 1/2 |...|^2 - ...
  std::uint64_t violations_upper = 0;  ///< (max eta)^2 (t-s)^2 <= 2 |...|^2 + ...
};

/// The two elementary weighted-difference estimates
///   (eta1^2 ^ eta2^2)|t-s|^2 >= 1/2 |eta1 t - eta2 s|^2 - (eta1-eta2)^2 (t^2 v s^2)
///   (eta1^2 v eta2^2)|t-s|^2 <= 2 |eta1 t - eta2 s|^2 + 2 (eta1-eta2)^2 (t^2 v s^2)
/// for t, s > 0 and eta1, eta2 >= 0. Plan variables: "t", "s" (positive,
/// log-uniform), "eta" (>= 0, drawn twice).
GenauxReport check_genaux(const SamplePlan& plan);

/// Adaptive quadrature of  int_{|y|>1} (1+|x-y|)^{-d-2s} |y|^{-d-2s} dy  to
/// absolute tolerance tol, split at the envelope's natural breakpoints and
/// mapped to bounded intervals on the tails. Throws QuadratureError if the
/// requested tolerance is unreachable.
double tail_weight_integral(double x, double s, int dim, double tol);

struct ChainRuleReport {
  double max_abs_residual = 0.0;
  double scale = 0.0;  ///< largest |term| entering the identity, for relative reading
};

/// Three-way product rearrangement used when substituting test functions:
///   (p1-p2)(u1 q1 - u2 q2)
///     = 1/2 (p1-p2)(u1-u2)(q1+q2) + 1/2 (p1-p2)(u1+u2)(q1-q2)
///     = (u1-u2)(p1 q1 - p2 q2) - 1/2 (u1-u2)(q1-q2)(p1+p2)
///       + 1/2 (p1-p2)(u1+u2)(q1-q2).
/// Exact identity; the checker reports the worst floating-point residual over
/// the plan (variables "phi", "u", "xi", each drawn twice).
ChainRuleReport check_chain_rule_identity(const SamplePlan& plan);

}  // namespace harnack
