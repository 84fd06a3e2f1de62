#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "harnack/sampling.hpp"

namespace harnack {

/// Families of symmetric jump kernels K(t;x,y) = a(t;x,y) |x-y|^{-d-2s} with
/// amplitude a confined to the ellipticity window [lambda, Lambda].
enum class KernelFamily {
  frac_laplacian,    ///< constant amplitude (family param "a", default 1)
  checkerboard,      ///< amplitude alternates lambda/Lambda on space-time cells
  time_oscillating,  ///< amplitude flips between lambda and Lambda in time only
  custom_table,      ///< amplitude from a small symmetric cell table (tests/demos)
};

std::string family_name(KernelFamily family);
KernelFamily family_from_name(const std::string& name);

struct KernelSpec {
  double s = 0.5;      ///< fractional order, in (0,1)
  int dim = 1;         ///< spatial dimension (only 1 supported)
  double lambda = 1.0; ///< lower ellipticity bound, > 0
  double Lambda = 1.0; ///< upper ellipticity bound, >= lambda
  KernelFamily family = KernelFamily::frac_laplacian;
  std::map<std::string, double> family_params;

  /// Throws std::invalid_argument when a structural invariant fails
  /// (s outside (0,1), dim != 1, ellipticity window empty or nonpositive,
  /// family parameters out of range).
  void validate() const;

  double param(const std::string& name, double fallback) const;
};

/// K(t;x,y). Pure; symmetric in (x,y); throws std::domain_error at x == y
/// where the kernel is singular.
double evaluate(const KernelSpec& spec, double t, double x, double y);

/// Amplitude a(t;x,y) = K(t;x,y)·|x-y|^{d+2s}, the quantity the ellipticity
/// window constrains.
double amplitude(const KernelSpec& spec, double t, double x, double y);

/// Identifies the maximal interval of times around t on which the kernel is
/// constant in t. Families piecewise-constant in time return a small integer
/// label per piece (used to cache factorizations); time-independent families
/// always return 0.
std::int64_t time_key(const KernelSpec& spec, double t);

/// True when the amplitude does not depend on the spatial pair (x, y).
/// Space-inhomogeneous families (cell tables) make exterior tail integrals
/// oscillate through infinitely many cells, which limits the accuracy that
/// pointwise quadrature can honestly deliver.
bool space_homogeneous(const KernelSpec& spec);

struct BoundReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  bool pass = false;
};

/// Samples K·|x-y|^{d+2s} over the plan (variables "t", "x", "y") and checks
/// containment in [lambda, Lambda] up to relative tolerance 1e-12.
BoundReport verify_bounds(const KernelSpec& spec, const SamplePlan& plan);

struct UjsReport {
  double worst_ratio = 0.0;
  double quad_tol = 0.0;
  bool pass = false;
};

/// Checks the "no isolated long-range spikes" condition: for sampled (t,x,y),
/// K(t;x,y) must not exceed Lambda times the mean of K(t;z,y) over the ball
/// B_r(x), the mean computed with >= 64 midpoint nodes. Samples must satisfy
/// r <= min(1/4, |x-y|/4); violating samples raise std::invalid_argument.
UjsReport verify_ujs(const KernelSpec& spec, double r, const SamplePlan& plan);

/// JSON round trip: {"s":..,"dim":1,"lambda":..,"Lambda":..,"family":"..","params":{..}}.
std::string to_json(const KernelSpec& spec);
KernelSpec kernel_from_json(const std::string& text);

}  // namespace harnack
