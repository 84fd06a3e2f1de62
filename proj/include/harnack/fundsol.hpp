#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "harnack/evolution.hpp"
#include "harnack/grid.hpp"
#include "harnack/kernels.hpp"

/// Numerical transition densities p_{eta,t}(x,y) and their structural checks:
/// nonnegativity, sub-unit mass, composition over an intermediate time,
/// forward/dual symmetry, and the two-sided space-time envelope.
namespace harnack {

/// Density table sampled at selected times and source nodes.
/// Forward tables hold p_{eta, times[k]}(x_i, y_j): column j evolves a
/// unit-mass bump placed at source node j at start time eta. Dual tables
/// hold the backward density started from terminal time eta instead, sampled
/// at earlier times.
struct HeatKernelTable {
  Grid grid;
  KernelSpec kernel;
  bool is_dual = false;
  double eta = 0.0;  ///< start time (forward) or terminal time (dual)
  double dt = 0.0;
  std::vector<double> times;          ///< ascending evaluation times
  std::vector<std::size_t> sources;   ///< node indices of the bump data
  /// values[j][k][i] = density for source j, time times[k], node i.
  std::vector<std::vector<std::vector<double>>> values;

  double value(std::size_t source, std::size_t time_idx, std::size_t node) const {
    return values[source][time_idx][node];
  }
  std::size_t time_index(double t) const;  ///< nearest within dt/2, else throws

  /// CSV export with columns t, x, y, p.
  void export_csv(std::ostream& out) const;
};

/// Forward table: one zero-exterior Cauchy solve per source, frames kept at
/// the requested times only. All times must exceed eta by a whole number of
/// steps.
HeatKernelTable compute_table(const KernelSpec& spec, const Grid& grid, double eta,
                              const std::vector<double>& times,
                              const std::vector<std::size_t>& sources, double dt);

/// Dual table via solve_dual: column j evolves a terminal bump at source j
/// backward from terminal_time; sampled at the requested earlier times.
HeatKernelTable compute_dual_table(const KernelSpec& spec, const Grid& grid,
                                   double terminal_time, const std::vector<double>& times,
                                   const std::vector<std::size_t>& sources, double dt);

struct MassReport {
  double max_mass = 0.0;     ///< largest column mass over sources and times
  double min_entry = 0.0;    ///< smallest table entry (nonnegativity witness)
  bool nonincreasing = true; ///< column masses nonincreasing in time
  bool pass = false;         ///< min_entry >= 0, max_mass <= 1 + slack, nonincreasing
};

/// Nonnegativity and sub-unit, nonincreasing mass per column.
MassReport check_mass(const HeatKernelTable& table, double slack = 1e-8);

struct CompositionReport {
  double max_rel_err = 0.0;
  std::size_t pairs_checked = 0;
};

/// Composition over the intermediate time: compares the direct density
/// p_{eta,t}(x,y) with sum_z h p_{tau,t}(x,z) p_{eta,tau}(z,y) for x, y
/// ranging over the table's sources, building the tau-started columns
/// internally. The first factor is read off the tau-started column at x via
/// the kernel's spatial symmetry (exact for time-independent amplitudes).
/// Pairs with direct density < 1e-6 are skipped.
CompositionReport check_chapman_kolmogorov(const HeatKernelTable& table, double tau, double t);

/// Forward/dual symmetry: dual density at (y, x) against forward density at
/// (x, y), over shared sources, at t = dual.eta and eta = forward.eta.
/// Entries below 1e-6 are skipped.
CompositionReport check_duality(const HeatKernelTable& forward, const HeatKernelTable& dual);

struct EnvelopeReport {
  double min_ratio = 0.0;   ///< min of p / envelope over admitted entries
  double max_ratio = 0.0;   ///< max of the same
  double centering = 0.0;   ///< sqrt(max_ratio * min_ratio), the centering constant
  double measured_C = 0.0;  ///< sqrt(max_ratio / min_ratio): smallest C with
                            ///< centering/C <= p/envelope <= centering*C
  bool holds_upper = false; ///< measured_C <= requested C
  bool holds_lower = false; ///< same by construction of the centering
  std::size_t entries_checked = 0;
};

/// Two-sided envelope min(t^{-d/2s}, t |x-y|^{-d-2s}) on elapsed time
/// t - eta, over entries with t - eta >= 10 dt, |x - y| <= L/2 and
/// |x| <= L/2 (early-time and boundary-collar exclusions).
EnvelopeReport check_envelope(const HeatKernelTable& table, double C);

}  // namespace harnack
