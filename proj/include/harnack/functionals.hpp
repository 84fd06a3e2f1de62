#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "harnack/evolution.hpp"

/// Cylinder extrema, weighted tail/mass integrals, energy and reverse-Hoelder
/// quotients, and per-theorem verdict reports over solution fields.
namespace harnack {

/// Parabolic cylinder attached to a reference scale tau: stored stamps t with
/// window_lo*tau <= t <= window_hi*tau (1e-9 slack at both edges; the initial
/// stamp t = 0 is always excluded so singular initial data never enter) and
/// grid nodes with |x - x0| <= radius_scale * tau^{radius_exponent} (1e-12
/// slack on the radius).
struct CylinderSpec {
  double tau = 1.0;
  double x0 = 0.0;
  double window_lo = 0.25;       ///< fraction of tau, in [0, window_hi)
  double window_hi = 1.0;        ///< fraction of tau, in (window_lo, 1]
  double radius_exponent = 1.0;  ///< 1/(2s) gives the natural parabolic ball
  double radius_scale = 1.0;     ///< extra factor on the ball radius

  double t_lo() const { return window_lo * tau; }
  double t_hi() const { return window_hi * tau; }
  double radius() const;

  /// Throws std::invalid_argument unless tau > 0, 0 <= window_lo < window_hi
  /// <= 1, and the radius parameters are positive.
  void validate() const;
};

/// Discrete sup over the cylinder: max of frame values over selected nodes
/// and stamps (no sub-grid interpolation). Throws std::invalid_argument when
/// the cylinder selects no stored frame or no grid node, or when the ball
/// pokes outside the grid box.
double cylinder_sup(const SolutionField& field, const CylinderSpec& cyl);

/// Discrete inf over the cylinder (same selection rules as cylinder_sup).
double cylinder_inf(const SolutionField& field, const CylinderSpec& cyl);

/// Sup over window stamps of the equal-weight node mean over the ball.
double cylinder_sup_mean(const SolutionField& field, const CylinderSpec& cyl);

/// tau * [ sum_i h u(tau,x_i) (tau^{1/2s} + |x_i - x0|)^{-(d+2s)} + closure ],
/// the weighted tail functional of the frame nearest tau (within dt/2). The
/// closure term extends the sum past the box by the matched-decay profile
/// u_edge (L/|y|)^{d+2s} when the field's policy is truncated_global; for
/// zero_exterior and dirichlet_data fields only the grid sum contributes.
double weighted_tail_integral(const SolutionField& field, double tau, double x0);

/// sum_i h u(t,x_i) (1+|x_i|)^{-(d+2s)} + matched-decay closure: the discrete
/// weighted-L1 mass against the reference measure mu.
double weighted_l1_mu(const SolutionField& field, double t);

/// sum_i h u(t,x_i) psi(t,x_i) for two fields sharing one grid; throws
/// std::invalid_argument on grid mismatch or missing stamp.
double dual_pairing(const SolutionField& u_field, const SolutionField& psi_field, double t);

struct PsiBoundReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  std::size_t frames_used = 0;
};

/// Extremes of psi(t,x) * (1+|x|)^{d+2s} over nodes |x| <= L/2 and stamps
/// t <= T - 10 dt. Requires a dual-mode field whose terminal frame equals
/// (1+|x|)^{-(d+2s)} within 1e-12 per node (throws otherwise).
PsiBoundReport psi_bound_ratio(const SolutionField& psi_field);

struct EnergyReport {
  double lhs = 0.0;
  double rhs_base = 0.0;
  double ratio = 0.0;
};

/// Space-time energy of nearest-neighbour-corrected kernel differences
///   lhs = sum_{stamps in (0,tau]} dt_frame * sum_{i != j in B} h |u_i - u_j|
///         w_ij(t) |x_i - x_j|,   B = {|x - x0| <= radius},
/// against rhs_base = tau^{1-1/q} ( sum_{stamps in (0,2 tau]} dt_frame *
/// sum_{|x - x0| <= 2 radius} h u^q )^{1/q}. Requires q in (1, 1+2s/d)
/// (throws std::invalid_argument otherwise) and at least two stored stamps.
EnergyReport energy_triple_integral(const SolutionField& field, double tau, double x0,
                                    double radius, double q);

/// ( sum_{(0,tau/2]} dt sum_{|x-x0| <= r/2} h u^q )^{1/q} divided by
/// ( sum_{(0,tau]}  dt sum_{|x-x0| <= r}   h u^sigma )^{1/sigma} with
/// r = tau^{1/2s}: the half-cylinder to full-cylinder quotient. Requires
/// 0 < sigma < q < 1+2s/d.
double reverse_holder_ratio(const SolutionField& field, double sigma, double q,
                            double tau = 1.0, double x0 = 0.0);

/// Verdict identifiers, one per checked estimate. The sweep's `taus` list is
/// interpreted per theorem: the cylinder scale tau for THM_0_* / THM_ELLIPTIC
/// / THM_GENERAL, the ball radius R for THM_IWH, the anchor time t_o for
/// BND_LOCAL and WHI_GLOBAL, and the window [taus.front(), taus.back()] of
/// stamps for PROP_L1; LEM_L1_PROP and LIOUVILLE ignore it.
enum class TheoremId {
  thm_0_sup,       ///< sup over (tau/4,tau] ball cylinder <= c * weighted tail
  thm_0_inf,       ///< weighted tail <= c * inf over (3tau/4,tau] cylinder
  thm_0_harnack,   ///< sup over (tau/4,tau] <= c * inf over (3tau/4,tau]
  thm_elliptic,    ///< single-slice sup/inf at t=tau against the tail
  thm_general,     ///< thm_0_sup form, meant for checkerboard-kernel fields
  thm_iwh,         ///< sup of ball means over (0,R^2s] <= c inf over [2R^2s,8R^2s]
  bnd_local,       ///< sup over (t_o,T] x B_5 <= c (interior + tail integrals)
  whi_global,      ///< scaled weighted integral over [t_o/4,t_o/2] <= c inf
  prop_l1,         ///< weighted-L1 mass comparable across stamps
  prop_exp_pos,    ///< measure-to-pointwise positivity, fitted (eta, p)
  lem_l1_prop,     ///< initial L1 mass propagates: inf_(0,tau] int_B1 u >= c_o/2
  liouville,       ///< qualitative oscillation-decay trend, never gates
};

std::string theorem_name(TheoremId id);
TheoremId theorem_from_name(const std::string& name);

struct HarnackInstance {
  double tau = 0.0;
  double x0 = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double c = 0.0;  ///< lhs / rhs, the empirical constant of this instance
};

struct VerdictSweep {
  std::vector<double> taus;
  std::vector<double> x0s{0.0};
  double ceiling = 0.0;               ///< pass requires max_c <= ceiling
  double tau_stability_limit = 3.0;   ///< pass requires max/min over taus <= this
};

struct HarnackReport {
  std::string theorem;
  std::vector<HarnackInstance> instances;
  double max_c = 0.0;
  double tau_stability = 1.0;
  bool pass = false;
  std::map<std::string, double> extras;  ///< fitted exponents, trend values

  /// {"theorem","instances":[{tau,x0,lhs,rhs,c}],"max_c","tau_stability",
  ///  "pass"} (+"extras" object when non-empty), serialized deterministically.
  std::string to_json() const;

  /// Flat "theorem,tau,x0,lhs,rhs,c" rows for plotting.
  void write_csv(std::ostream& out) const;
};

/// Evaluates one estimate instance-by-instance over the sweep and renders the
/// verdict: c = lhs/rhs per instance, max_c over the sweep, tau_stability =
/// worst max/min of c over taus at fixed center (and fixed comparison form),
/// pass = (max_c <= ceiling) and (tau_stability <= limit) and all quantities
/// finite. LIOUVILLE reports a trend and always passes. Throws
/// std::invalid_argument for ids needing other entry points (prop_exp_pos)
/// or malformed sweeps.
HarnackReport verdict_theorem(const SolutionField& field, TheoremId id,
                              const VerdictSweep& sweep);

/// PROP_EXP_POS entry point. fields[k] must start from the indicator datum of
/// {|x - x0| <= alphas[k] * R} at level k_level; the functional measures
/// m_k = inf over (R^{2s}, 4 R^{2s}] x B_{2R}(x0), fits the exponent p as the
/// least-squares slope of log m against log alpha, and reports eta =
/// m(alpha=1) / k_level. Instance k records lhs = eta * alphas[k]^p * k_level
/// (the fitted prediction), rhs = m_k, c = lhs/rhs; extras carry eta and p.
/// Requires alphas.front() == 1 and as many fields as alphas.
HarnackReport verdict_expansion_of_positivity(std::span<const SolutionField> fields,
                                              std::span<const double> alphas, double R,
                                              double k_level, double x0, double ceiling);

}  // namespace harnack
