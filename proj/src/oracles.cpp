#include "harnack/oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace harnack {

double poisson_kernel(double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("poisson_kernel requires t > 0");
  return (1.0 / M_PI) * t / (t * t + x * x);
}

double poisson_kernel_box(double t, double x, double w) {
  if (!(t > 0.0)) throw std::domain_error("poisson_kernel_box requires t > 0");
  if (!(w > 0.0)) throw std::domain_error("poisson_kernel_box requires w > 0");
  return (std::atan((x + 0.5 * w) / t) - std::atan((x - 0.5 * w) / t)) / (M_PI * w);
}

double gaussian_kernel(double t, double x) {
  if (!(t > 0.0)) throw std::domain_error("gaussian_kernel requires t > 0");
  return std::exp(-x * x / (4.0 * t)) / std::sqrt(4.0 * M_PI * t);
}

double poisson_weighted_l1(double t) {
  if (!(t > 0.0)) throw std::domain_error("poisson_weighted_l1 requires t > 0");
  // Partial fractions of t/((t^2+x^2)(1+x)^2) integrated over the line give
  //   f(t) = (C - D) + (2 t / pi)(C log t + D)
  // with C = 2/(1+t^2)^2 and D = 1/(1+t^2); f(1) = 1/pi and f -> 1 as t -> 0.
  const double den = 1.0 + t * t;
  const double C = 2.0 / (den * den);
  const double D = 1.0 / den;
  return (C - D) + (2.0 * t / M_PI) * (C * std::log(t) + D);
}

double hk_envelope(double t, double x, double s, int dim) {
  if (!(t > 0.0)) throw std::domain_error("hk_envelope requires t > 0");
  if (!(s > 0.0 && s < 1.0)) throw std::domain_error("hk_envelope requires s in (0,1)");
  if (dim != 1) throw std::domain_error("hk_envelope supports dim = 1 only");
  const double self = std::pow(t, -dim / (2.0 * s));
  if (x == 0.0) return self;
  const double far = t * std::pow(std::abs(x), -(dim + 2.0 * s));
  return std::min(self, far);
}

}  // namespace harnack
