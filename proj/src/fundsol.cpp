#include "harnack/fundsol.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "harnack/linsolve.hpp"
#include "harnack/oracles.hpp"

namespace harnack {

namespace {

/// Maps requested sample times to positive step indices from the march
/// origin; validates spacing and ascending order.
std::vector<std::size_t> step_targets(const std::vector<double>& times, double origin,
                                      double dt, bool backward) {
  if (times.empty()) throw std::invalid_argument("heat kernel table: need at least one time");
  if (!(dt > 0.0)) throw std::invalid_argument("heat kernel table: dt must be positive");
  std::vector<std::size_t> steps(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw std::invalid_argument("heat kernel table: times must strictly ascend");
    }
    const double span = backward ? origin - times[k] : times[k] - origin;
    if (!(span > 0.0)) {
      throw std::invalid_argument(backward
                                      ? "heat kernel table: dual times must precede the terminal time"
                                      : "heat kernel table: times must exceed the start time");
    }
    const double raw = span / dt;
    const auto s = static_cast<std::size_t>(std::llround(raw));
    if (s == 0 || std::abs(static_cast<double>(s) - raw) > 1e-8 * std::max(1.0, raw)) {
      throw std::invalid_argument("heat kernel table: times must sit on the step lattice");
    }
    steps[k] = s;
  }
  return steps;
}

/// Lockstep march of all source columns, collecting frames at the requested
/// step indices. kernel_time maps elapsed march time to kernel time.
HeatKernelTable march_table(const KernelSpec& spec, const Grid& grid, bool is_dual, double eta,
                            const std::vector<double>& times,
                            const std::vector<std::size_t>& sources, double dt) {
  spec.validate();
  if (grid.exterior_policy() != ExteriorPolicy::zero_exterior) {
    throw std::invalid_argument("heat kernel table: grid policy must be zero_exterior");
  }
  if (sources.empty()) throw std::invalid_argument("heat kernel table: need at least one source");
  for (const std::size_t j : sources) {
    if (j >= grid.size()) throw std::invalid_argument("heat kernel table: source index out of range");
  }
  const std::vector<std::size_t> targets = step_targets(times, eta, dt, is_dual);

  HeatKernelTable table{grid, spec, is_dual, eta, dt, {}, sources, {}};
  table.times.resize(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double span = static_cast<double>(targets[k]) * dt;
    table.times[k] = is_dual ? eta - span : eta + span;
  }
  table.values.assign(sources.size(), std::vector<std::vector<double>>(times.size()));

  std::vector<std::vector<double>> columns(sources.size());
  for (std::size_t j = 0; j < sources.size(); ++j) columns[j] = bump_datum(grid, sources[j]);

  // table.times[k] was built from targets[k], so a march step hitting
  // targets[k] fills slot k directly (for dual tables targets descend with k,
  // matching the ascending times).
  std::size_t max_step = 0;
  for (const std::size_t s : targets) max_step = std::max(max_step, s);

  StepEngineCache cache(spec, grid, dt);
  for (std::size_t step = 1; step <= max_step; ++step) {
    const double elapsed = static_cast<double>(step) * dt;
    const double t_kernel = is_dual ? eta - elapsed : eta + elapsed;
    StepEngine& engine = cache.at_time(t_kernel);
    for (auto& column : columns) {
      column = engine.solver.solve(column, column);
    }
    for (std::size_t k = 0; k < targets.size(); ++k) {
      if (targets[k] != step) continue;
      for (std::size_t j = 0; j < sources.size(); ++j) table.values[j][k] = columns[j];
    }
  }
  return table;
}

}  // namespace

std::size_t HeatKernelTable::time_index(double t) const {
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (std::abs(times[k] - t) <= dt / 2.0 + 1e-12) return k;
  }
  throw std::invalid_argument("HeatKernelTable: no sampled time within dt/2 of request");
}

void HeatKernelTable::export_csv(std::ostream& out) const {
  out << "t,x,y,p\n";
  char line[128];
  for (std::size_t j = 0; j < sources.size(); ++j) {
    const double y = grid.node(sources[j]);
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t i = 0; i < grid.size(); ++i) {
        std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g\n", times[k], grid.node(i), y,
                      values[j][k][i]);
        out << line;
      }
    }
  }
}

HeatKernelTable compute_table(const KernelSpec& spec, const Grid& grid, double eta,
                              const std::vector<double>& times,
                              const std::vector<std::size_t>& sources, double dt) {
  return march_table(spec, grid, /*is_dual=*/false, eta, times, sources, dt);
}

HeatKernelTable compute_dual_table(const KernelSpec& spec, const Grid& grid,
                                   double terminal_time, const std::vector<double>& times,
                                   const std::vector<std::size_t>& sources, double dt) {
  return march_table(spec, grid, /*is_dual=*/true, terminal_time, times, sources, dt);
}

MassReport check_mass(const HeatKernelTable& table, double slack) {
  MassReport report;
  report.min_entry = std::numeric_limits<double>::infinity();
  for (const auto& column : table.values) {
    double previous = std::numeric_limits<double>::infinity();
    for (const auto& frame : column) {
      double mass = 0.0;
      for (const double v : frame) {
        mass += v;
        report.min_entry = std::min(report.min_entry, v);
      }
      mass *= table.grid.spacing();
      report.max_mass = std::max(report.max_mass, mass);
      if (mass > previous + 1e-12) report.nonincreasing = false;
      previous = mass;
    }
  }
  report.pass = report.min_entry >= 0.0 && report.max_mass <= 1.0 + slack && report.nonincreasing;
  return report;
}

CompositionReport check_chapman_kolmogorov(const HeatKernelTable& table, double tau, double t) {
  if (table.is_dual) {
    throw std::invalid_argument("check_chapman_kolmogorov: needs a forward table");
  }
  if (!(table.eta < tau && tau < t)) {
    throw std::invalid_argument("check_chapman_kolmogorov: need eta < tau < t");
  }
  const std::size_t k_tau = table.time_index(tau);
  const std::size_t k_t = table.time_index(t);

  // Columns restarted at tau from each source; the composition reads the
  // first factor through the kernel's spatial symmetry.
  const HeatKernelTable mid =
      compute_table(table.kernel, table.grid, table.times[k_tau], {table.times[k_t]},
                    table.sources, table.dt);

  const double h = table.grid.spacing();
  const std::size_t n = table.grid.size();
  CompositionReport report;
  for (std::size_t a = 0; a < table.sources.size(); ++a) {
    const std::size_t x_node = table.sources[a];
    for (std::size_t b = 0; b < table.sources.size(); ++b) {
      const double direct = table.values[b][k_t][x_node];
      if (direct < 1e-6) continue;
      double comp = 0.0;
      const std::vector<double>& late = mid.values[a][0];     // p_{tau,t}(z, x_a)
      const std::vector<double>& early = table.values[b][k_tau];  // p_{eta,tau}(z, y_b)
      for (std::size_t z = 0; z < n; ++z) comp += late[z] * early[z];
      comp *= h;
      report.max_rel_err = std::max(report.max_rel_err, std::abs(comp - direct) / direct);
      ++report.pairs_checked;
    }
  }
  return report;
}

CompositionReport check_duality(const HeatKernelTable& forward, const HeatKernelTable& dual) {
  if (forward.is_dual || !dual.is_dual) {
    throw std::invalid_argument("check_duality: need a forward table and a dual table");
  }
  if (forward.grid.size() != dual.grid.size() ||
      forward.grid.half_width() != dual.grid.half_width() ||
      forward.sources != dual.sources || to_json(forward.kernel) != to_json(dual.kernel)) {
    throw std::invalid_argument("check_duality: tables must share grid, kernel, and sources");
  }
  const std::size_t k_t = forward.time_index(dual.eta);    // forward sampled at terminal time
  const std::size_t k_eta = dual.time_index(forward.eta);  // dual sampled at start time

  CompositionReport report;
  for (std::size_t a = 0; a < dual.sources.size(); ++a) {
    const std::size_t x_node = dual.sources[a];
    for (std::size_t j = 0; j < forward.sources.size(); ++j) {
      const std::size_t y_node = forward.sources[j];
      const double direct = forward.values[j][k_t][x_node];  // p_{eta,t}(x_a, y_j)
      if (direct < 1e-6) continue;
      const double dual_val = dual.values[a][k_eta][y_node];  // dual density at (y_j, x_a)
      report.max_rel_err = std::max(report.max_rel_err, std::abs(dual_val - direct) / direct);
      ++report.pairs_checked;
    }
  }
  return report;
}

EnvelopeReport check_envelope(const HeatKernelTable& table, double C) {
  if (table.is_dual) throw std::invalid_argument("check_envelope: needs a forward table");
  EnvelopeReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  const double L = table.grid.half_width();
  const double collar = L / 2.0;
  for (std::size_t j = 0; j < table.sources.size(); ++j) {
    const double y = table.grid.node(table.sources[j]);
    for (std::size_t k = 0; k < table.times.size(); ++k) {
      const double elapsed = table.times[k] - table.eta;
      if (elapsed < 10.0 * table.dt - 1e-12) continue;
      for (std::size_t i = 0; i < table.grid.size(); ++i) {
        const double x = table.grid.node(i);
        if (std::abs(x) > collar || std::abs(x - y) > collar) continue;
        const double envelope = hk_envelope(elapsed, x - y, table.kernel.s, table.kernel.dim);
        const double ratio = table.values[j][k][i] / envelope;
        report.min_ratio = std::min(report.min_ratio, ratio);
        report.max_ratio = std::max(report.max_ratio, ratio);
        ++report.entries_checked;
      }
    }
  }
  if (report.entries_checked == 0) {
    throw std::invalid_argument("check_envelope: exclusions left no entries to check");
  }
  report.centering = std::sqrt(report.max_ratio * report.min_ratio);
  report.measured_C = std::sqrt(report.max_ratio / report.min_ratio);
  report.holds_upper = report.measured_C <= C;
  report.holds_lower = report.holds_upper;
  return report;
}

}  // namespace harnack
