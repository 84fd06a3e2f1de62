#pragma once

/// Closed-form reference solutions and the two-sided decay envelope used to
/// benchmark the solver at s = 1/2, d = 1.
namespace harnack {

/// Poisson kernel (1/pi) t/(t^2+x^2): the fundamental solution of the
/// half-Laplacian evolution in one dimension. Throws std::domain_error for
/// t <= 0.
double poisson_kernel(double t, double x);

/// Average of the Poisson kernel at time t over the box [x-w/2, x+w/2];
/// closed form via arctan. This is what a unit-mass box datum of width w
/// evolves to, making it the exact comparison target for bump-started runs.
double poisson_kernel_box(double t, double x, double w);

/// Gaussian heat kernel (4 pi t)^{-1/2} exp(-x^2/(4t)). Throws
/// std::domain_error for t <= 0.
double gaussian_kernel(double t, double x);

/// int P(t,x) (1+|x|)^{-2} dx in closed form: the weighted-L1 mass of the
/// Poisson kernel against the reference measure mu, the exact target for the
/// discrete weighted norms. Decreases from 1 (t -> 0) through 1/pi (t = 1).
/// Throws std::domain_error for t <= 0.
double poisson_weighted_l1(double t);

/// Two-sided decay envelope min(t^{-d/2s}, t/|x|^{d+2s}), with the convention
/// value t^{-d/2s} at x = 0. Throws std::domain_error for t <= 0 or s
/// outside (0,1).
double hk_envelope(double t, double x, double s, int dim = 1);

}  // namespace harnack
