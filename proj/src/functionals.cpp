#include "harnack/functionals.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include "harnack/op.hpp"
#include "harnack/parallel.hpp"
#include "harnack/quadrature.hpp"
#include "json.hpp"

namespace harnack {

namespace {

constexpr double kStampFuzz = 1e-9;     // slack for window membership at stored stamps
constexpr double kBallFuzz = 1e-12;     // slack for ball membership at grid nodes
constexpr double kPositiveTime = 1e-12; // stamps at or below this count as the initial one
constexpr double kClosureTol = 1e-11;   // absolute tolerance of closure quadratures

double decay_power(const SolutionField& field) {
  return static_cast<double>(field.kernel().dim) + 2.0 * field.kernel().s;
}

double parabolic_radius(const SolutionField& field, double tau) {
  return std::pow(tau, 1.0 / (2.0 * field.kernel().s));
}

/// Stored stamps t with lo <= t <= hi (1e-9 slack), always excluding the
/// initial stamp; lo_strict additionally drops t == lo (open lower edge).
std::vector<std::size_t> stamps_in(const SolutionField& field, double lo, double hi,
                                   bool lo_strict = false) {
  std::vector<std::size_t> ks;
  for (std::size_t k = 0; k < field.frame_count(); ++k) {
    const double t = field.time(k);
    if (t <= kPositiveTime) continue;
    if (lo_strict ? t <= lo + kStampFuzz : t < lo - kStampFuzz) continue;
    if (t > hi + kStampFuzz) continue;
    ks.push_back(k);
  }
  return ks;
}

std::vector<std::size_t> nodes_in(const Grid& grid, double x0, double radius) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid.node(i) - x0) <= radius + kBallFuzz) idx.push_back(i);
  }
  return idx;
}

void require_ball_inside(const Grid& grid, double x0, double radius, const char* what) {
  if (std::abs(x0) + radius > grid.half_width() + kBallFuzz) {
    throw std::invalid_argument(std::string(what) + ": ball pokes outside the grid box");
  }
}

enum class Extreme { sup, inf, sup_mean };

/// max / min / max-of-means of frame values over stamps in [t_lo, t_hi] and
/// nodes in B_radius(x0). Absolute window bounds; used by the public cylinder
/// ops and by verdicts whose windows are not fractions of one tau.
double extreme_over(const SolutionField& field, double t_lo, double t_hi, double x0,
                    double radius, Extreme mode, bool lo_strict = false) {
  require_ball_inside(field.grid(), x0, radius, "cylinder");
  const auto ks = stamps_in(field, t_lo, t_hi, lo_strict);
  if (ks.empty()) throw std::invalid_argument("cylinder selects no stored frame");
  const auto nodes = nodes_in(field.grid(), x0, radius);
  if (nodes.empty()) throw std::invalid_argument("cylinder selects no grid node");
  double best = mode == Extreme::inf ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
  for (const std::size_t k : ks) {
    const auto& u = field.frame(k);
    if (mode == Extreme::sup_mean) {
      double sum = 0.0;
      for (const std::size_t i : nodes) sum += u[i];
      best = std::max(best, sum / static_cast<double>(nodes.size()));
    } else {
      for (const std::size_t i : nodes) {
        best = mode == Extreme::sup ? std::max(best, u[i]) : std::min(best, u[i]);
      }
    }
  }
  return best;
}

/// Matched-decay closure of sum_i h u_i phi(x_i): adds the two half-line
/// integrals u_edge int_L^inf (L/y)^p phi(+-y) dy for truncated_global
/// fields, zero otherwise (zero_exterior is exact, dirichlet_data fields do
/// not carry their exterior values).
double closure_sum(const SolutionField& field, std::span<const double> u,
                   const std::function<double(double)>& phi) {
  if (field.grid().exterior_policy() != ExteriorPolicy::truncated_global) return 0.0;
  const double L = field.grid().half_width();
  const double p = decay_power(field);
  const auto decay = [&](double y) { return std::pow(L / y, p); };
  const double right =
      integrate_tail([&](double y) { return decay(y) * phi(y); }, L, kClosureTol);
  const double left =
      integrate_tail([&](double y) { return decay(y) * phi(-y); }, L, kClosureTol);
  return std::abs(u[u.size() - 1]) * right + std::abs(u[0]) * left;
}

double weighted_frame_sum(const SolutionField& field, std::span<const double> u,
                          const std::function<double(double)>& phi) {
  const Grid& grid = field.grid();
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sum += grid.spacing() * std::abs(u[i]) * phi(grid.node(i));
  }
  return sum + closure_sum(field, u, phi);
}

double frame_spacing(const SolutionField& field) {
  if (field.frame_count() < 2) {
    throw std::invalid_argument("time integrals need at least two stored stamps");
  }
  return field.time(1) - field.time(0);
}

void require_exponent_range(const SolutionField& field, double q, const char* what) {
  const double top = 1.0 + 2.0 * field.kernel().s / static_cast<double>(field.kernel().dim);
  if (!(q > 1.0) || !(q < top)) {
    throw std::invalid_argument(std::string(what) + ": q out of range (1, 1+2s/d)");
  }
}

}  // namespace

double CylinderSpec::radius() const { return radius_scale * std::pow(tau, radius_exponent); }

void CylinderSpec::validate() const {
  if (!(tau > 0.0)) throw std::invalid_argument("cylinder tau must be positive");
  if (!(window_lo >= 0.0) || !(window_lo < window_hi) || !(window_hi <= 1.0)) {
    throw std::invalid_argument("cylinder window must satisfy 0 <= lo < hi <= 1");
  }
  if (!(radius_exponent > 0.0) || !(radius_scale > 0.0)) {
    throw std::invalid_argument("cylinder radius parameters must be positive");
  }
}

double cylinder_sup(const SolutionField& field, const CylinderSpec& cyl) {
  cyl.validate();
  return extreme_over(field, cyl.t_lo(), cyl.t_hi(), cyl.x0, cyl.radius(), Extreme::sup);
}

double cylinder_inf(const SolutionField& field, const CylinderSpec& cyl) {
  cyl.validate();
  return extreme_over(field, cyl.t_lo(), cyl.t_hi(), cyl.x0, cyl.radius(), Extreme::inf);
}

double cylinder_sup_mean(const SolutionField& field, const CylinderSpec& cyl) {
  cyl.validate();
  return extreme_over(field, cyl.t_lo(), cyl.t_hi(), cyl.x0, cyl.radius(), Extreme::sup_mean);
}

double weighted_tail_integral(const SolutionField& field, double tau, double x0) {
  if (!(tau > 0.0)) throw std::invalid_argument("weighted_tail_integral: tau must be positive");
  const auto& u = field.frame_at(tau);
  const double p = decay_power(field);
  const double r = parabolic_radius(field, tau);
  const auto phi = [&](double y) { return std::pow(r + std::abs(y - x0), -p); };
  return tau * weighted_frame_sum(field, u, phi);
}

double weighted_l1_mu(const SolutionField& field, double t) {
  const auto& u = field.frame_at(t);
  const double p = decay_power(field);
  const auto phi = [&](double y) { return std::pow(1.0 + std::abs(y), -p); };
  return weighted_frame_sum(field, u, phi);
}

double dual_pairing(const SolutionField& u_field, const SolutionField& psi_field, double t) {
  const Grid& gu = u_field.grid();
  const Grid& gp = psi_field.grid();
  if (gu.size() != gp.size() || gu.half_width() != gp.half_width()) {
    throw std::invalid_argument("dual_pairing: fields do not share a grid");
  }
  const auto& u = u_field.frame_at(t);
  const auto& psi = psi_field.frame_at(t);
  double sum = 0.0;
  for (std::size_t i = 0; i < gu.size(); ++i) sum += gu.spacing() * u[i] * psi[i];
  return sum;
}

PsiBoundReport psi_bound_ratio(const SolutionField& psi_field) {
  if (psi_field.mode() != SolveMode::dual) {
    throw std::invalid_argument("psi_bound_ratio: field is not a dual-mode run");
  }
  const Grid& grid = psi_field.grid();
  const double p = decay_power(psi_field);
  const auto& terminal = psi_field.frame(psi_field.frame_count() - 1);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double ref = std::pow(1.0 + std::abs(grid.node(i)), -p);
    if (std::abs(terminal[i] - ref) > 1e-12) {
      throw std::invalid_argument("psi_bound_ratio: terminal datum is not (1+|x|)^-(d+2s)");
    }
  }
  const double T = psi_field.times().back();
  const double cutoff = T - 10.0 * psi_field.dt();
  const auto nodes = nodes_in(grid, 0.0, grid.half_width() / 2.0);
  PsiBoundReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < psi_field.frame_count(); ++k) {
    if (psi_field.time(k) > cutoff + kStampFuzz) continue;
    const auto& psi = psi_field.frame(k);
    for (const std::size_t i : nodes) {
      const double ratio = psi[i] * std::pow(1.0 + std::abs(grid.node(i)), p);
      report.min_ratio = std::min(report.min_ratio, ratio);
      report.max_ratio = std::max(report.max_ratio, ratio);
    }
    ++report.frames_used;
  }
  if (report.frames_used == 0) {
    throw std::invalid_argument("psi_bound_ratio: no stamps at or below T - 10 dt");
  }
  return report;
}

EnergyReport energy_triple_integral(const SolutionField& field, double tau, double x0,
                                    double radius, double q) {
  require_exponent_range(field, q, "energy_triple_integral");
  if (!(tau > 0.0) || !(radius > 0.0)) {
    throw std::invalid_argument("energy_triple_integral: tau and radius must be positive");
  }
  const Grid& grid = field.grid();
  require_ball_inside(grid, x0, 2.0 * radius, "energy_triple_integral");
  const double dtau = frame_spacing(field);
  const double h = grid.spacing();

  const auto inner = nodes_in(grid, x0, radius);
  const auto outer = nodes_in(grid, x0, 2.0 * radius);
  const auto ks_lhs = stamps_in(field, 0.0, tau);
  const auto ks_rhs = stamps_in(field, 0.0, 2.0 * tau);
  if (ks_lhs.empty() || ks_rhs.empty()) {
    throw std::invalid_argument("energy_triple_integral: cylinder selects no stored frame");
  }

  // Kernel-difference energy over the inner ball; the pair-weight block is
  // cached per kernel-constancy interval so time-dependent kernels reuse it.
  const std::size_t m = inner.size();
  std::map<std::int64_t, std::vector<double>> blocks;
  const auto block_for = [&](double t) -> const std::vector<double>& {
    const std::int64_t key = time_key(field.kernel(), t);
    auto it = blocks.find(key);
    if (it == blocks.end()) {
      std::vector<double> block(m * m, 0.0);
      parallel::par_for(m, [&](std::size_t a) {
        for (std::size_t b = 0; b < m; ++b) {
          if (a == b) continue;
          block[a * m + b] = pair_weight(field.kernel(), grid, t, inner[a], inner[b]);
        }
      });
      it = blocks.emplace(key, std::move(block)).first;
    }
    return it->second;
  };

  EnergyReport report;
  for (const std::size_t k : ks_lhs) {
    const auto& u = field.frame(k);
    const auto& w = block_for(field.time(k));
    double frame_sum = 0.0;
    for (std::size_t a = 0; a < m; ++a) {
      const double xa = grid.node(inner[a]);
      const double ua = u[inner[a]];
      for (std::size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        frame_sum += h * std::abs(ua - u[inner[b]]) * w[a * m + b] *
                     std::abs(xa - grid.node(inner[b]));
      }
    }
    report.lhs += dtau * frame_sum;
  }

  double rhs_int = 0.0;
  for (const std::size_t k : ks_rhs) {
    const auto& u = field.frame(k);
    double frame_sum = 0.0;
    for (const std::size_t i : outer) frame_sum += h * std::pow(u[i], q);
    rhs_int += dtau * frame_sum;
  }
  report.rhs_base = std::pow(tau, 1.0 - 1.0 / q) * std::pow(rhs_int, 1.0 / q);
  if (!(report.rhs_base > 0.0)) {
    throw std::invalid_argument("energy_triple_integral: field vanishes on the doubled cylinder");
  }
  report.ratio = report.lhs / report.rhs_base;
  return report;
}

double reverse_holder_ratio(const SolutionField& field, double sigma, double q, double tau,
                            double x0) {
  require_exponent_range(field, q, "reverse_holder_ratio");
  if (!(sigma > 0.0) || !(sigma < q)) {
    throw std::invalid_argument("reverse_holder_ratio: need 0 < sigma < q");
  }
  if (!(tau > 0.0)) throw std::invalid_argument("reverse_holder_ratio: tau must be positive");
  const Grid& grid = field.grid();
  const double r = parabolic_radius(field, tau);
  require_ball_inside(grid, x0, r, "reverse_holder_ratio");
  const double dtau = frame_spacing(field);
  const double h = grid.spacing();

  const auto cylinder_power_sum = [&](double t_hi, double radius, double exponent) {
    const auto ks = stamps_in(field, 0.0, t_hi);
    if (ks.empty()) {
      throw std::invalid_argument("reverse_holder_ratio: cylinder selects no stored frame");
    }
    const auto nodes = nodes_in(grid, x0, radius);
    double total = 0.0;
    for (const std::size_t k : ks) {
      const auto& u = field.frame(k);
      double frame_sum = 0.0;
      for (const std::size_t i : nodes) frame_sum += h * std::pow(u[i], exponent);
      total += dtau * frame_sum;
    }
    return total;
  };

  const double num_int = cylinder_power_sum(tau / 2.0, r / 2.0, q);
  const double den_int = cylinder_power_sum(tau, r, sigma);
  if (!(den_int > 0.0)) {
    throw std::invalid_argument("reverse_holder_ratio: field vanishes on the full cylinder");
  }
  return std::pow(num_int, 1.0 / q) / std::pow(den_int, 1.0 / sigma);
}

std::string theorem_name(TheoremId id) {
  switch (id) {
    case TheoremId::thm_0_sup: return "THM_0_SUP";
    case TheoremId::thm_0_inf: return "THM_0_INF";
    case TheoremId::thm_0_harnack: return "THM_0_HARNACK";
    case TheoremId::thm_elliptic: return "THM_ELLIPTIC";
    case TheoremId::thm_general: return "THM_GENERAL";
    case TheoremId::thm_iwh: return "THM_IWH";
    case TheoremId::bnd_local: return "BND_LOCAL";
    case TheoremId::whi_global: return "WHI_GLOBAL";
    case TheoremId::prop_l1: return "PROP_L1";
    case TheoremId::prop_exp_pos: return "PROP_EXP_POS";
    case TheoremId::lem_l1_prop: return "LEM_L1_PROP";
    case TheoremId::liouville: return "LIOUVILLE";
  }
  throw std::logic_error("unreachable theorem id");
}

TheoremId theorem_from_name(const std::string& name) {
  static const std::map<std::string, TheoremId> table = {
      {"THM_0_SUP", TheoremId::thm_0_sup},       {"THM_0_INF", TheoremId::thm_0_inf},
      {"THM_0_HARNACK", TheoremId::thm_0_harnack}, {"THM_ELLIPTIC", TheoremId::thm_elliptic},
      {"THM_GENERAL", TheoremId::thm_general},   {"THM_IWH", TheoremId::thm_iwh},
      {"BND_LOCAL", TheoremId::bnd_local},       {"WHI_GLOBAL", TheoremId::whi_global},
      {"PROP_L1", TheoremId::prop_l1},           {"PROP_EXP_POS", TheoremId::prop_exp_pos},
      {"LEM_L1_PROP", TheoremId::lem_l1_prop},   {"LIOUVILLE", TheoremId::liouville},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown theorem id: " + name);
  return it->second;
}

namespace {

/// Assembles the report from instances tagged with a stability group (same
/// center and comparison form); tau_stability is the worst max/min of c
/// within one group.
HarnackReport finalize_report(TheoremId id, std::vector<HarnackInstance> instances,
                              const std::vector<std::size_t>& groups, double ceiling,
                              double stability_limit, bool always_pass = false) {
  HarnackReport report;
  report.theorem = theorem_name(id);
  report.instances = std::move(instances);
  report.max_c = 0.0;
  bool finite = !report.instances.empty();
  for (const auto& inst : report.instances) {
    if (!std::isfinite(inst.lhs) || !std::isfinite(inst.rhs) || !std::isfinite(inst.c)) {
      finite = false;
    }
    report.max_c = std::max(report.max_c, inst.c);
  }
  std::map<std::size_t, std::pair<double, double>> ranges;  // group -> (min, max)
  for (std::size_t k = 0; k < report.instances.size(); ++k) {
    const double c = report.instances[k].c;
    auto [it, fresh] = ranges.emplace(groups[k], std::make_pair(c, c));
    if (!fresh) {
      it->second.first = std::min(it->second.first, c);
      it->second.second = std::max(it->second.second, c);
    }
  }
  report.tau_stability = 1.0;
  for (const auto& entry : ranges) {
    if (entry.second.first > 0.0) {
      report.tau_stability = std::max(report.tau_stability, entry.second.second / entry.second.first);
    } else {
      finite = false;
    }
  }
  report.pass = always_pass ||
                (finite && report.max_c <= ceiling && report.tau_stability <= stability_limit);
  return report;
}

double slice_extreme(const SolutionField& field, double tau, double x0, double radius,
                     Extreme mode) {
  require_ball_inside(field.grid(), x0, radius, "slice");
  const auto& u = field.frame_at(tau);
  const auto nodes = nodes_in(field.grid(), x0, radius);
  if (nodes.empty()) throw std::invalid_argument("slice selects no grid node");
  double best = mode == Extreme::inf ? std::numeric_limits<double>::infinity()
                                     : -std::numeric_limits<double>::infinity();
  for (const std::size_t i : nodes) {
    best = mode == Extreme::sup ? std::max(best, u[i]) : std::min(best, u[i]);
  }
  return best;
}

/// Right-endpoint time integral of a weighted spatial mass over stamps in
/// [lo, hi]: sum_k dtau * (sum_i h u_i phi(x_i) + closure).
double time_integral_weighted(const SolutionField& field, double lo, double hi,
                              const std::function<double(double)>& phi) {
  const double dtau = frame_spacing(field);
  const auto ks = stamps_in(field, lo, hi);
  if (ks.empty()) throw std::invalid_argument("time integral selects no stored frame");
  double total = 0.0;
  for (const std::size_t k : ks) {
    total += dtau * weighted_frame_sum(field, field.frame(k), phi);
  }
  return total;
}

}  // namespace

HarnackReport verdict_theorem(const SolutionField& field, TheoremId id,
                              const VerdictSweep& sweep) {
  const double inv2s = 1.0 / (2.0 * field.kernel().s);
  const double p = decay_power(field);
  std::vector<HarnackInstance> instances;
  std::vector<std::size_t> groups;
  const auto push = [&](std::size_t group, double tau, double x0, double lhs, double rhs) {
    const double c = rhs > 0.0 ? lhs / rhs : std::numeric_limits<double>::infinity();
    instances.push_back({tau, x0, lhs, rhs, c});
    groups.push_back(group);
  };

  switch (id) {
    case TheoremId::thm_0_sup:
    case TheoremId::thm_general:
    case TheoremId::thm_0_inf:
    case TheoremId::thm_0_harnack: {
      if (sweep.taus.empty() || sweep.x0s.empty()) {
        throw std::invalid_argument("verdict sweep needs taus and x0s");
      }
      std::size_t group = 0;
      for (const double x0 : sweep.x0s) {
        for (const double tau : sweep.taus) {
          const CylinderSpec quarter{tau, x0, 0.25, 1.0, inv2s, 1.0};
          const CylinderSpec late{tau, x0, 0.75, 1.0, inv2s, 1.0};
          if (id == TheoremId::thm_0_inf) {
            push(group, tau, x0, weighted_tail_integral(field, tau, x0),
                 cylinder_inf(field, late));
          } else if (id == TheoremId::thm_0_harnack) {
            push(group, tau, x0, cylinder_sup(field, quarter), cylinder_inf(field, late));
          } else {
            push(group, tau, x0, cylinder_sup(field, quarter),
                 weighted_tail_integral(field, tau, x0));
          }
        }
        ++group;
      }
      break;
    }
    case TheoremId::thm_elliptic: {
      if (sweep.taus.empty() || sweep.x0s.empty()) {
        throw std::invalid_argument("verdict sweep needs taus and x0s");
      }
      std::size_t group = 0;
      for (const double x0 : sweep.x0s) {
        for (const double tau : sweep.taus) {
          const double radius = std::pow(tau, inv2s);
          const double tail = weighted_tail_integral(field, tau, x0);
          push(group, tau, x0, slice_extreme(field, tau, x0, radius, Extreme::sup), tail);
          push(group + 1, tau, x0, tail, slice_extreme(field, tau, x0, radius, Extreme::inf));
        }
        group += 2;  // sup-form and inf-form stabilities are tracked separately
      }
      break;
    }
    case TheoremId::thm_iwh: {
      if (sweep.taus.empty() || sweep.x0s.empty()) {
        throw std::invalid_argument("verdict sweep needs taus (radii R) and x0s");
      }
      std::size_t group = 0;
      for (const double x0 : sweep.x0s) {
        for (const double R : sweep.taus) {
          const double tau_r = std::pow(R, 2.0 * field.kernel().s);
          const double lhs = extreme_over(field, 0.0, tau_r, x0, R, Extreme::sup_mean);
          const double rhs =
              extreme_over(field, 2.0 * tau_r, 8.0 * tau_r, x0, R, Extreme::inf);
          push(group, R, x0, lhs, rhs);
        }
        ++group;
      }
      break;
    }
    case TheoremId::bnd_local: {
      if (sweep.taus.empty() || sweep.x0s.empty()) {
        throw std::invalid_argument("verdict sweep needs taus (anchor times) and x0s");
      }
      const double T_end = field.times().back();
      std::size_t group = 0;
      for (const double x0 : sweep.x0s) {
        require_ball_inside(field.grid(), x0, 10.0, "BND_LOCAL");
        const auto phi = [&](double y) {
          const double d = std::abs(y - x0);
          return d <= 10.0 + kBallFuzz ? 1.0 : std::pow(d, -p);
        };
        const double rhs = time_integral_weighted(field, 0.0, T_end, phi);
        for (const double t_o : sweep.taus) {
          const double lhs =
              extreme_over(field, t_o, T_end, x0, 5.0, Extreme::sup, /*lo_strict=*/true);
          push(group, t_o, x0, lhs, rhs);
        }
        ++group;
      }
      break;
    }
    case TheoremId::whi_global: {
      if (sweep.taus.empty() || sweep.x0s.empty()) {
        throw std::invalid_argument("verdict sweep needs taus (anchor times) and x0s");
      }
      std::size_t group = 0;
      for (const double x0 : sweep.x0s) {
        const auto phi = [&](double y) { return std::pow(1.0 + std::abs(y - x0), -p); };
        for (const double t_o : sweep.taus) {
          const double scale =
              1.0 / std::max(1.0, std::pow(t_o, 1.0 + field.kernel().dim * inv2s));
          const double lhs =
              scale * time_integral_weighted(field, t_o / 4.0, t_o / 2.0, phi);
          const double rhs = extreme_over(field, 0.75 * t_o, t_o, x0,
                                          std::pow(t_o, inv2s), Extreme::inf);
          push(group, t_o, x0, lhs, rhs);
        }
        ++group;
      }
      break;
    }
    case TheoremId::prop_l1: {
      if (sweep.taus.size() < 2) {
        throw std::invalid_argument("PROP_L1 sweep needs a stamp window [lo, hi]");
      }
      const auto ks = stamps_in(field, sweep.taus.front(), sweep.taus.back());
      if (ks.empty()) throw std::invalid_argument("PROP_L1 window selects no stored frame");
      std::vector<double> norms(ks.size());
      for (std::size_t j = 0; j < ks.size(); ++j) {
        norms[j] = weighted_l1_mu(field, field.time(ks[j]));
      }
      const double lowest = *std::min_element(norms.begin(), norms.end());
      for (std::size_t j = 0; j < ks.size(); ++j) {
        push(0, field.time(ks[j]), 0.0, norms[j], lowest);
      }
      break;
    }
    case TheoremId::lem_l1_prop: {
      const double x0 = sweep.x0s.empty() ? 0.0 : sweep.x0s.front();
      const Grid& grid = field.grid();
      const auto half_ball = nodes_in(grid, x0, 0.5);
      const auto unit_ball = nodes_in(grid, x0, 1.0);
      const auto& u0 = field.frame(0);
      double c_o = 0.0;
      for (const std::size_t i : half_ball) c_o += grid.spacing() * u0[i];
      if (!(c_o > 0.0)) {
        throw std::invalid_argument("LEM_L1_PROP: initial datum carries no mass on B_1/2");
      }
      const auto ks = stamps_in(field, 0.0, 0.25);
      if (ks.empty()) throw std::invalid_argument("LEM_L1_PROP: no stamps in (0, 1/4]");
      double running_inf = std::numeric_limits<double>::infinity();
      double best_tau = 0.0;
      double best_inf = 0.0;
      double first_inf = 0.0;
      for (std::size_t j = 0; j < ks.size(); ++j) {
        const auto& u = field.frame(ks[j]);
        double mass = 0.0;
        for (const std::size_t i : unit_ball) mass += grid.spacing() * u[i];
        running_inf = std::min(running_inf, mass);
        if (j == 0) first_inf = running_inf;
        if (running_inf >= 0.5 * c_o) {
          best_tau = field.time(ks[j]);
          best_inf = running_inf;
        }
      }
      if (best_tau > 0.0) {
        push(0, best_tau, x0, 0.5 * c_o, best_inf);
      } else {
        push(0, 0.0, x0, 0.5 * c_o, first_inf);  // no qualifying tau: c > 1 fails the gate
      }
      break;
    }
    case TheoremId::liouville: {
      const double x0 = sweep.x0s.empty() ? 0.0 : sweep.x0s.front();
      const double T_end = field.times().back();
      const auto window_quotient = [&](double lo, double hi) {
        const double sup = extreme_over(field, lo, hi, x0, 1.0, Extreme::sup);
        const double inf = extreme_over(field, lo, hi, x0, 1.0, Extreme::inf);
        return std::array<double, 2>{sup, inf};
      };
      const auto early = window_quotient(0.10 * T_end, 0.25 * T_end);
      const auto late = window_quotient(0.75 * T_end, T_end);
      push(0, 0.25 * T_end, x0, early[0], early[1]);
      push(1, T_end, x0, late[0], late[1]);
      HarnackReport report = finalize_report(id, std::move(instances), groups, sweep.ceiling,
                                             sweep.tau_stability_limit, /*always_pass=*/true);
      report.extras["osc_quotient_early"] = report.instances[0].c;
      report.extras["osc_quotient_late"] = report.instances[1].c;
      report.extras["flattening"] =
          report.instances[1].c <= report.instances[0].c ? 1.0 : 0.0;
      return report;
    }
    case TheoremId::prop_exp_pos:
      throw std::invalid_argument(
          "PROP_EXP_POS takes prepared indicator runs; use verdict_expansion_of_positivity");
  }

  return finalize_report(id, std::move(instances), groups, sweep.ceiling,
                         sweep.tau_stability_limit);
}

HarnackReport verdict_expansion_of_positivity(std::span<const SolutionField> fields,
                                              std::span<const double> alphas, double R,
                                              double k_level, double x0, double ceiling) {
  if (fields.size() != alphas.size() || fields.size() < 2) {
    throw std::invalid_argument("expansion verdict needs one field per alpha, at least two");
  }
  if (std::abs(alphas[0] - 1.0) > kBallFuzz) {
    throw std::invalid_argument("expansion verdict: alphas must start at 1");
  }
  if (!(R > 0.0) || !(k_level > 0.0)) {
    throw std::invalid_argument("expansion verdict: R and k_level must be positive");
  }
  std::vector<double> m(fields.size());
  for (std::size_t k = 0; k < fields.size(); ++k) {
    if (!(alphas[k] > 0.0) || alphas[k] > 1.0 + kBallFuzz) {
      throw std::invalid_argument("expansion verdict: alphas must lie in (0, 1]");
    }
    const double tau_r = std::pow(R, 2.0 * fields[k].kernel().s);
    m[k] = extreme_over(fields[k], tau_r, 4.0 * tau_r, x0, 2.0 * R, Extreme::inf);
  }

  // Least-squares slope of log m against log alpha; eta from the alpha = 1 run.
  double la_mean = 0.0, lm_mean = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    if (!(m[k] > 0.0)) {
      throw std::invalid_argument("expansion verdict: field not positive on target cylinder");
    }
    la_mean += std::log(alphas[k]);
    lm_mean += std::log(m[k]);
  }
  la_mean /= static_cast<double>(m.size());
  lm_mean /= static_cast<double>(m.size());
  double cov = 0.0, var = 0.0;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double da = std::log(alphas[k]) - la_mean;
    cov += da * (std::log(m[k]) - lm_mean);
    var += da * da;
  }
  const double fitted_p = cov / var;
  const double eta = m[0] / k_level;

  std::vector<HarnackInstance> instances;
  std::vector<std::size_t> groups;
  for (std::size_t k = 0; k < m.size(); ++k) {
    const double predicted = eta * std::pow(alphas[k], fitted_p) * k_level;
    instances.push_back({alphas[k], x0, predicted, m[k], predicted / m[k]});
    groups.push_back(0);
  }
  HarnackReport report = finalize_report(TheoremId::prop_exp_pos, std::move(instances), groups,
                                         ceiling, 3.0);
  report.extras["eta"] = eta;
  report.extras["p"] = fitted_p;
  if (!(eta > 0.0)) report.pass = false;
  return report;
}

std::string HarnackReport::to_json() const {
  nlohmann::ordered_json j;
  j["theorem"] = theorem;
  j["instances"] = nlohmann::ordered_json::array();
  for (const auto& inst : instances) {
    nlohmann::ordered_json row;
    row["tau"] = inst.tau;
    row["x0"] = inst.x0;
    row["lhs"] = inst.lhs;
    row["rhs"] = inst.rhs;
    row["c"] = inst.c;
    j["instances"].push_back(row);
  }
  j["max_c"] = max_c;
  j["tau_stability"] = tau_stability;
  j["pass"] = pass;
  if (!extras.empty()) j["extras"] = extras;
  return j.dump();
}

void HarnackReport::write_csv(std::ostream& out) const {
  out << "theorem,tau,x0,lhs,rhs,c\n";
  char line[256];
  for (const auto& inst : instances) {
    std::snprintf(line, sizeof(line), "%s,%.12g,%.12g,%.12g,%.12g,%.12g\n", theorem.c_str(),
                  inst.tau, inst.x0, inst.lhs, inst.rhs, inst.c);
    out << line;
  }
}

}  // namespace harnack
