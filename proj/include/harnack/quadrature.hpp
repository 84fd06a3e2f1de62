#pragma once

#include <functional>
#include <stdexcept>

/// Adaptive quadrature for the singular/tail integrals of the kernel class.
namespace harnack {

struct QuadratureError : std::runtime_error {
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_tolerance(achieved) {}
  double achieved_tolerance;
};

using RealFn = std::function<double(double)>;

/// Adaptive Simpson integration of f over [a, b] to absolute tolerance tol.
/// Throws QuadratureError with the achieved tolerance if the recursion depth
/// is exhausted before reaching tol.
double integrate(const RealFn& f, double a, double b, double tol);

/// Integral of f over [a, +inf), a > 0, via the substitution y = 1/u which
/// maps the tail to the bounded interval (0, 1/a]. Intended for integrands
/// decaying at least like y^{-2}, where the substituted integrand
/// f(1/u)/u^2 is bounded.
double integrate_tail(const RealFn& f, double a, double tol);

}  // namespace harnack
