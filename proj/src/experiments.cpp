#include "harnack/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

#include "json.hpp"

#include "harnack/evolution.hpp"
#include "harnack/functionals.hpp"
#include "harnack/fundsol.hpp"
#include "harnack/grid.hpp"
#include "harnack/inequality.hpp"
#include "harnack/oracles.hpp"
#include "harnack/parallel.hpp"

namespace harnack {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

/// Amplitude for which the kernel a |x-y|^{-2} generates exactly the
/// half-Laplacian evolution solved by the closed-form reference kernels.
constexpr double kOracleAmplitude = 1.0 / std::numbers::pi;

/// Continuum birth time assigned to the discrete unit bump: a one-cell box of
/// mass one behaves like the exact solution started this long before t = 0.
constexpr double kBumpInitTime = 0.01;

/// Stored stamps within this distance of zero count as the start time (guards
/// against t_start + k dt landing at a few ulp instead of exactly 0).
constexpr double kZeroStampFuzz = 1e-12;

constexpr double kWindowFuzz = 1e-9;  ///< slack when selecting stamp windows

/// Fixed secondary parameters of the sweeps (documented here rather than in
/// the config so reports stay comparable across runs).
constexpr std::array<double, 2> kEnergyQs{1.5, 1.75};
constexpr double kHolderSigma = 1.0;
constexpr double kHolderQ = 1.5;
constexpr std::array<double, 3> kExpansionAlphas{1.0, 0.5, 0.25};
constexpr double kExpansionR = 1.0;
constexpr double kExpansionLevel = 1.0;
constexpr double kExpansionT = 4.0;
constexpr double kExpansionDt = 1e-3;
constexpr std::size_t kExpansionStore = 20;
constexpr double kContrastShift = 1.0;  ///< E6 observes fields born one unit earlier
constexpr std::uint64_t kSampleCount = 100000;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::string(buf);
}

/// Tiny deterministic CSV builder (fixed "%.12g" cells, comma separated).
struct Csv {
  std::string text;

  explicit Csv(const std::string& header) { text = header + "\n"; }

  void row(std::initializer_list<double> cells) {
    bool first = true;
    for (const double v : cells) {
      if (!first) text += ',';
      text += fmt(v);
      first = false;
    }
    text += '\n';
  }

  void row(const std::string& label, std::initializer_list<double> cells) {
    text += label;
    for (const double v : cells) {
      text += ',';
      text += fmt(v);
    }
    text += '\n';
  }
};

/// Accumulates checks, embedded verdict reports, and CSV artifacts while a
/// runner executes.
struct RunContext {
  const ExperimentConfig& cfg;
  std::vector<CheckResult> checks;
  ordered_json reports = ordered_json::object();
  std::vector<std::pair<std::string, std::string>> csvs;

  double ceiling(const std::string& name) const {
    const auto it = cfg.ceilings.find(name);
    if (it == cfg.ceilings.end()) {
      throw std::invalid_argument("missing ceiling '" + name + "'");
    }
    return it->second;
  }

  bool add(const std::string& name, double value, std::string gate, bool pass) {
    checks.push_back({name, value, std::move(gate), pass});
    return pass;
  }

  bool check_le(const std::string& name, double value, double limit) {
    return add(name, value, "<= " + fmt(limit), value <= limit);
  }
  bool check_ge(const std::string& name, double value, double limit) {
    return add(name, value, ">= " + fmt(limit), value >= limit);
  }
  bool check_in(const std::string& name, double value, double lo, double hi) {
    return add(name, value, "in [" + fmt(lo) + ", " + fmt(hi) + "]",
               value >= lo && value <= hi);
  }
  bool check_zero(const std::string& name, double value) {
    return add(name, value, "== 0", value == 0.0);
  }
  bool check_pos(const std::string& name, double value) {
    return add(name, value, "> 0", value > 0.0);
  }
  void info(const std::string& name, double value) { add(name, value, "reported", true); }

  void add_report(const std::string& key, const HarnackReport& rep) {
    reports[key] = ordered_json::parse(rep.to_json());
    add(key, rep.max_c, "verdict (max_c shown)", rep.pass);
  }

  VerdictSweep sweep(const std::string& ceiling_name) const {
    return VerdictSweep{cfg.sweeps.taus, cfg.sweeps.x0s, ceiling(ceiling_name), 3.0};
  }
};

Grid make_grid(const ExperimentConfig& cfg, ExteriorPolicy policy) {
  return Grid(cfg.half_width, cfg.cells, policy);
}

KernelSpec oracle_kernel() {
  KernelSpec spec;
  spec.s = 0.5;
  spec.dim = 1;
  spec.lambda = kOracleAmplitude;
  spec.Lambda = kOracleAmplitude;
  spec.family = KernelFamily::frac_laplacian;
  spec.family_params["a"] = kOracleAmplitude;
  return spec;
}

/// True when the closed-form reference solutions apply to this kernel.
bool matches_oracle(const KernelSpec& spec) {
  return spec.family == KernelFamily::frac_laplacian && std::abs(spec.s - 0.5) < 1e-12 &&
         std::abs(spec.param("a", 1.0) - kOracleAmplitude) < 1e-12;
}

/// Companion kernels used by E7/E8/E10: the ellipticity window [3a/4, 5a/4]
/// around the primary amplitude a, alternating in space-time cells or in time.
KernelSpec checkerboard_companion(const KernelSpec& base, double cell_t) {
  const double a = base.param("a", 1.0);
  KernelSpec spec = base;
  spec.family = KernelFamily::checkerboard;
  spec.lambda = 0.75 * a;
  spec.Lambda = 1.25 * a;
  spec.family_params.clear();
  spec.family_params["cell_x"] = 1.0;
  spec.family_params["cell_t"] = cell_t;
  return spec;
}

KernelSpec oscillating_companion(const KernelSpec& base) {
  const double a = base.param("a", 1.0);
  KernelSpec spec = base;
  spec.family = KernelFamily::time_oscillating;
  spec.lambda = 0.75 * a;
  spec.Lambda = 1.25 * a;
  spec.family_params.clear();
  spec.family_params["omega"] = 2.0 * std::numbers::pi;
  return spec;
}

std::vector<double> wide_datum(const Grid& grid) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = 1.0 + std::abs(grid.node(i)) / 4.0;
    f[i] = 1.0 / (r * r);
  }
  return f;
}

std::vector<double> mu_datum(const Grid& grid, double power) {
  std::vector<double> f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f[i] = std::pow(1.0 + std::abs(grid.node(i)), -power);
  }
  return f;
}

std::vector<double> indicator_datum(const Grid& grid, double x0, double radius, double level) {
  std::vector<double> f(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid.node(i) - x0) <= radius + 1e-12) f[i] = level;
  }
  return f;
}

/// The stamp pattern solve_cauchy stores: every store_every-th step plus the
/// final one, times measured from t_start.
std::vector<double> storage_times(double t_start, double T, double dt, std::size_t every) {
  const auto steps = static_cast<std::size_t>(std::llround((T - t_start) / dt));
  std::vector<double> times;
  for (std::size_t k = 0; k <= steps; ++k) {
    if (k % every == 0 || k == steps) {
      times.push_back(t_start + static_cast<double>(k) * dt);
    }
  }
  return times;
}

/// Field whose frames are eval(t, x) on the stored lattice; frame 0 (the
/// singular birth stamp) holds the unit bump the exact solution emanates from.
SolutionField inject_field(const KernelSpec& spec, const Grid& grid, double T, double dt,
                           std::size_t every,
                           const std::function<double(double, double)>& eval) {
  const auto times = storage_times(0.0, T, dt, every);
  std::vector<std::vector<double>> frames(times.size());
  frames[0] = bump_datum(grid, grid.center_index());
  for (std::size_t k = 1; k < times.size(); ++k) {
    frames[k].resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      frames[k][i] = eval(times[k], grid.node(i));
    }
  }
  return SolutionField(grid, spec, SolveMode::cauchy, dt, times, std::move(frames));
}

SolutionField inject_poisson(const Grid& grid, double T, double dt, std::size_t every) {
  return inject_field(oracle_kernel(), grid, T, dt, every,
                      [](double t, double x) { return poisson_kernel(t, x); });
}

/// E6 observation window: frames at stamp t hold the exact solution at
/// absolute time shift + t, so the singular birth lies strictly before the
/// window and both fields are smooth on every stored frame.
SolutionField inject_shifted(const Grid& grid, double T, double dt, std::size_t every,
                             bool gaussian) {
  const auto times = storage_times(0.0, T, dt, every);
  std::vector<std::vector<double>> frames(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    frames[k].resize(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double t = kContrastShift + times[k];
      const double x = grid.node(i);
      frames[k][i] = gaussian ? gaussian_kernel(t, x) : poisson_kernel(t, x);
    }
  }
  return SolutionField(grid, oracle_kernel(), SolveMode::cauchy, dt, times, std::move(frames));
}

const HarnackInstance* find_instance(const HarnackReport& rep, double tau, double x0) {
  for (const auto& inst : rep.instances) {
    if (std::abs(inst.tau - tau) <= 1e-12 && std::abs(inst.x0 - x0) <= 1e-12) return &inst;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// E1: time-insensitive sup/inf/Harnack verdicts + solver-vs-oracle accuracy.
// ---------------------------------------------------------------------------

std::array<HarnackReport, 3> time_insensitive_reports(const RunContext& ctx,
                                                      const SolutionField& field,
                                                      const char* sup_name,
                                                      const char* inf_name,
                                                      const char* har_name) {
  return {verdict_theorem(field, TheoremId::thm_0_sup, ctx.sweep(sup_name)),
          verdict_theorem(field, TheoremId::thm_0_inf, ctx.sweep(inf_name)),
          verdict_theorem(field, TheoremId::thm_0_harnack, ctx.sweep(har_name))};
}

void run_e1(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::truncated_global);

  // Exact-solution section: closed-form frames on the stored lattice.
  const SolutionField oracle = inject_poisson(grid, cfg.T, cfg.dt, cfg.store_every);
  const auto oracle_reps = time_insensitive_reports(
      ctx, oracle, "oracle_thm_0_sup", "oracle_thm_0_inf", "oracle_thm_0_harnack");
  ctx.add_report("ORACLE_THM_0_SUP", oracle_reps[0]);
  ctx.add_report("ORACLE_THM_0_INF", oracle_reps[1]);
  ctx.add_report("ORACLE_THM_0_HARNACK", oracle_reps[2]);

  // Spot value: the sup-estimate constant at (tau = 1, x0 = 0) equals
  // sup/tail = (4/pi) / (1/pi) = 4 for the exact solution.
  if (const HarnackInstance* spot = find_instance(oracle_reps[0], 1.0, 0.0)) {
    const double tol = ctx.ceiling("spot_tol");
    ctx.check_in("oracle_spot_sup_c", spot->c, 4.0 * (1.0 - tol), 4.0 * (1.0 + tol));
  } else {
    ctx.add("oracle_spot_sup_c", 0.0, "needs tau = 1 and x0 = 0 in sweeps", false);
  }

  if (cfg.oracle_injection) return;

  const auto bump = bump_datum(grid, grid.center_index());
  const SolutionField u = solve_cauchy(cfg.kernel, grid, bump, cfg.T, cfg.dt, cfg.store_every);

  // Bump-started solve against the box-averaged exact solution.
  {
    const double t_check = std::min(0.5, cfg.T);
    const auto& frame = u.frame_at(t_check);
    double sup_err = 0.0;
    double sup_exact = 0.0;
    Csv csv("x,u,exact");
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i);
      if (std::abs(x) > 0.5 * grid.half_width()) continue;
      const double exact = poisson_kernel_box(t_check + kBumpInitTime, x, grid.spacing());
      sup_err = std::max(sup_err, std::abs(frame[i] - exact));
      sup_exact = std::max(sup_exact, exact);
      csv.row({x, frame[i], exact});
    }
    ctx.check_le("solver_sup_rel_error", sup_err / sup_exact, ctx.ceiling("solver_sup_rel"));
    ctx.csvs.emplace_back("solver_vs_exact.csv", std::move(csv.text));
  }

  // Frame-wise conservation monotonicity and strict interior positivity.
  {
    double worst_mass_rise = -std::numeric_limits<double>::infinity();
    double worst_l2_rise = -std::numeric_limits<double>::infinity();
    double min_pos = std::numeric_limits<double>::infinity();
    double prev_mass = 0.0;
    double prev_l2 = 0.0;
    for (std::size_t k = 0; k < u.frame_count(); ++k) {
      const auto& frame = u.frame(k);
      const double mass = discrete_mass(grid, frame);
      const double l2 = discrete_l2(grid, frame);
      if (k > 0) {
        worst_mass_rise = std::max(worst_mass_rise, mass - prev_mass);
        worst_l2_rise = std::max(worst_l2_rise, l2 - prev_l2);
      }
      prev_mass = mass;
      prev_l2 = l2;
      if (u.time(k) > kZeroStampFuzz) {
        min_pos = std::min(min_pos, *std::min_element(frame.begin(), frame.end()));
      }
    }
    ctx.check_le("mass_increase_max", worst_mass_rise, 1e-12);
    ctx.check_le("l2_increase_max", worst_l2_rise, 1e-12);
    ctx.check_pos("positivity_min", min_pos);
  }

  const auto solver_reps = time_insensitive_reports(
      ctx, u, "solver_thm_0_sup", "solver_thm_0_inf", "solver_thm_0_harnack");
  ctx.add_report("SOLVER_THM_0_SUP", solver_reps[0]);
  ctx.add_report("SOLVER_THM_0_INF", solver_reps[1]);
  ctx.add_report("SOLVER_THM_0_HARNACK", solver_reps[2]);

  // Rough-coefficient companion: same estimates for a kernel that only obeys
  // the ellipticity window (no closed-form solution exists for it).
  if (cfg.kernel_b.has_value()) {
    const SolutionField ub =
        solve_cauchy(*cfg.kernel_b, grid, bump, cfg.T, cfg.dt, cfg.store_every);
    ctx.add_report("ROUGH_THM_GENERAL",
                   verdict_theorem(ub, TheoremId::thm_general, ctx.sweep("rough_thm_general")));
  }

  if (!cfg.hygiene) return;

  // Refinement hygiene: halving dt and h must barely move the reported
  // constants, and repeating the identical run must reproduce the reports
  // byte for byte.
  const auto max_cs = [](const std::array<HarnackReport, 3>& reps) {
    return std::array<double, 3>{reps[0].max_c, reps[1].max_c, reps[2].max_c};
  };
  const auto base_c = max_cs(solver_reps);

  const SolutionField u_dt =
      solve_cauchy(cfg.kernel, grid, bump, cfg.T, 0.5 * cfg.dt, 2 * cfg.store_every);
  const auto dt_c = max_cs(time_insensitive_reports(
      ctx, u_dt, "solver_thm_0_sup", "solver_thm_0_inf", "solver_thm_0_harnack"));

  const Grid fine(cfg.half_width, 2 * cfg.cells - 1, ExteriorPolicy::truncated_global);
  const SolutionField u_h = solve_cauchy(cfg.kernel, fine, bump_datum(fine, fine.center_index()),
                                         cfg.T, cfg.dt, cfg.store_every);
  const auto h_c = max_cs(time_insensitive_reports(
      ctx, u_h, "solver_thm_0_sup", "solver_thm_0_inf", "solver_thm_0_harnack"));

  double dt_rel = 0.0;
  double h_rel = 0.0;
  for (std::size_t k = 0; k < 3; ++k) {
    dt_rel = std::max(dt_rel, std::abs(dt_c[k] / base_c[k] - 1.0));
    h_rel = std::max(h_rel, std::abs(h_c[k] / base_c[k] - 1.0));
  }
  ctx.check_le("dt_halving_rel", dt_rel, ctx.ceiling("hygiene_dt_rel"));
  ctx.check_le("h_halving_rel", h_rel, ctx.ceiling("hygiene_h_rel"));

  const SolutionField u_re = solve_cauchy(cfg.kernel, grid, bump, cfg.T, cfg.dt, cfg.store_every);
  const auto re_reps = time_insensitive_reports(
      ctx, u_re, "solver_thm_0_sup", "solver_thm_0_inf", "solver_thm_0_harnack");
  const auto serialize = [](const std::array<HarnackReport, 3>& reps) {
    return reps[0].to_json() + reps[1].to_json() + reps[2].to_json();
  };
  const bool identical = serialize(solver_reps) == serialize(re_reps);
  ctx.add("rerun_byte_identical", identical ? 1.0 : 0.0, "== 1", identical);
}

// ---------------------------------------------------------------------------
// E2: elliptic-form verdicts at single slices + oscillation flattening trend.
// ---------------------------------------------------------------------------

void run_e2(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::truncated_global);

  const SolutionField oracle = inject_poisson(grid, cfg.T, cfg.dt, cfg.store_every);
  ctx.add_report("ORACLE_THM_ELLIPTIC",
                 verdict_theorem(oracle, TheoremId::thm_elliptic, ctx.sweep("oracle_elliptic")));

  const SolutionField* trend_field = &oracle;
  std::optional<SolutionField> solver_field;
  if (!cfg.oracle_injection) {
    solver_field = solve_cauchy(cfg.kernel, grid, bump_datum(grid, grid.center_index()), cfg.T,
                                cfg.dt, cfg.store_every);
    ctx.add_report(
        "SOLVER_THM_ELLIPTIC",
        verdict_theorem(*solver_field, TheoremId::thm_elliptic, ctx.sweep("solver_elliptic")));
    trend_field = &*solver_field;
  }

  const double x0 = cfg.sweeps.x0s.empty() ? 0.0 : cfg.sweeps.x0s.front();
  ctx.add_report("LIOUVILLE_TREND",
                 verdict_theorem(*trend_field, TheoremId::liouville,
                                 VerdictSweep{{cfg.T}, {x0}, 1.0, 3.0}));

  Csv csv("tau,x,u");
  for (const double tau : cfg.sweeps.taus) {
    const auto& frame = trend_field->frame_at(tau);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i);
      if (std::abs(x - x0) <= 5.0) csv.row({tau, x, frame[i]});
    }
  }
  ctx.csvs.emplace_back("elliptic_slices.csv", std::move(csv.text));
}

// ---------------------------------------------------------------------------
// E3: weighted-L1 comparability across stamps + quadrature-vs-closed-form.
// ---------------------------------------------------------------------------

void run_e3(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::truncated_global);

  // Exact field: the discrete weighted norm must reproduce the closed form.
  const SolutionField oracle = inject_poisson(grid, cfg.T, cfg.dt, cfg.store_every);
  {
    const std::array<double, 4> stamps{0.1, 0.25, 0.5, 1.0};
    double worst = 1.0;
    Csv csv("t,discrete,exact");
    for (const double t : stamps) {
      if (t > cfg.T + kWindowFuzz) continue;
      const double discrete = weighted_l1_mu(oracle, t);
      const double exact = poisson_weighted_l1(t);
      worst = std::max(worst, std::max(discrete / exact, exact / discrete));
      csv.row({t, discrete, exact});
    }
    ctx.check_le("oracle_quadrature_ratio", worst, ctx.ceiling("oracle_ratio"));
    ctx.csvs.emplace_back("mu_norm_exact.csv", std::move(csv.text));

    // The exact solution of singular (point mass) data is NOT in the
    // comparability class gated below; its spread documents the contrast.
    ctx.info("oracle_window_spread", weighted_l1_mu(oracle, cfg.sweeps.taus.front()) /
                                         weighted_l1_mu(oracle, cfg.sweeps.taus.back()));
  }

  if (cfg.oracle_injection) return;

  // Solver run from spread-out integrable data: norms comparable over the
  // whole window.
  const SolutionField u =
      solve_cauchy(cfg.kernel, grid, wide_datum(grid), cfg.T, cfg.dt, cfg.store_every);
  const HarnackReport rep = verdict_theorem(u, TheoremId::prop_l1, ctx.sweep("prop_l1"));
  ctx.add_report("PROP_L1", rep);

  Csv csv("t,mu_norm");
  for (const auto& inst : rep.instances) csv.row({inst.tau, inst.lhs});
  ctx.csvs.emplace_back("mu_norms.csv", std::move(csv.text));
}

// ---------------------------------------------------------------------------
// E4: dual test-function envelope bounds + pairing conservation.
// ---------------------------------------------------------------------------

void run_e4(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::truncated_global);
  const double power = cfg.kernel.dim + 2.0 * cfg.kernel.s;

  const SolutionField psi =
      solve_dual(cfg.kernel, grid, mu_datum(grid, power), cfg.T, cfg.dt, cfg.store_every);
  const PsiBoundReport pb = psi_bound_ratio(psi);
  ctx.check_ge("psi_min_ratio", pb.min_ratio, ctx.ceiling("psi_lo"));
  ctx.check_le("psi_max_ratio", pb.max_ratio, ctx.ceiling("psi_hi"));

  const SolutionField u =
      cfg.oracle_injection
          ? inject_poisson(grid, cfg.T, cfg.dt, cfg.store_every)
          : solve_cauchy(cfg.kernel, grid, bump_datum(grid, grid.center_index()), cfg.T, cfg.dt,
                         cfg.store_every);

  // The pairing sum_x h u psi is conserved by the forward/backward pair up to
  // discretization; gate its drift away from the horizon ends.
  {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    Csv csv("t,pairing");
    for (std::size_t k = 0; k < u.frame_count(); ++k) {
      const double t = u.time(k);
      if (t < 0.1 * cfg.T - kWindowFuzz || t > 0.9 * cfg.T + kWindowFuzz) continue;
      const double value = dual_pairing(u, psi, t);
      lo = std::min(lo, value);
      hi = std::max(hi, value);
      csv.row({t, value});
    }
    ctx.check_le("pairing_drift", hi / lo - 1.0, ctx.ceiling("pairing_drift"));
    ctx.csvs.emplace_back("pairing.csv", std::move(csv.text));
  }

  // Horizon behaviour. The weighted envelope follows the duration: the dual
  // started from a horizon tau satisfies psi(0, 0) = int P(tau, y) mu(y) dy
  // exactly in the continuum, so the start-frame center value must track the
  // closed form for both the base and the doubled horizon (gated only when
  // the kernel is the closed-form one). For time-independent kernels the
  // doubled-horizon run restricted to its last T of duration must also
  // reproduce the base run frame by frame.
  {
    const SolutionField psi2 =
        solve_dual(cfg.kernel, grid, mu_datum(grid, power), 2.0 * cfg.T, cfg.dt, cfg.store_every);
    const bool gated = matches_oracle(cfg.kernel);
    for (const auto* run : {&psi, &psi2}) {
      const double duration = run->time(run->frame_count() - 1);
      const double measured = run->frame(0)[grid.center_index()];
      const double rel = std::abs(measured / poisson_weighted_l1(duration) - 1.0);
      const std::string name = "dual_start_value_rel_" + fmt(duration);
      if (gated) {
        ctx.check_le(name, rel, ctx.ceiling("dual_oracle_rel"));
      } else {
        ctx.info(name, rel);
      }
    }
    bool autonomous = true;
    for (int k = 0; k <= 64; ++k) {
      autonomous = autonomous && time_key(cfg.kernel, 2.0 * cfg.T * k / 64.0) ==
                                     time_key(cfg.kernel, 0.0);
    }
    if (autonomous) {
      double worst = 0.0;
      for (std::size_t k = 0; k < psi.frame_count(); ++k) {
        const auto& late = psi2.frame_at(cfg.T + psi.time(k));
        const auto& base = psi.frame(k);
        double diff = 0.0;
        double top = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
          diff = std::max(diff, std::abs(late[i] - base[i]));
          top = std::max(top, std::abs(base[i]));
        }
        worst = std::max(worst, diff / top);
      }
      ctx.check_le("horizon_shift_sup_rel", worst, ctx.ceiling("shift_rel"));
    }
  }

  Csv csv("x,psi_start,weight");
  const auto& first = psi.frame(0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    if (std::abs(x) > 0.5 * grid.half_width()) continue;
    csv.row({x, first[i], std::pow(1.0 + std::abs(x), -power)});
  }
  ctx.csvs.emplace_back("psi_profile.csv", std::move(csv.text));
}

// ---------------------------------------------------------------------------
// E5: exterior-driven onset — exact zero before, positive after, and a slice
// quotient that collapses as time grows (the waiting-time demonstration).
// ---------------------------------------------------------------------------

void run_e5(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::dirichlet_data);

  // The exterior datum switches on at dt/2: strictly inside the first step
  // after t = 0, so no stamp within rounding noise of zero sees any load.
  const double onset = 0.5 * cfg.dt;
  const ExteriorData exterior{
      [onset](double t, double) { return t >= onset ? 1.0 : 0.0; }, {onset}};
  const std::vector<double> zero(grid.size(), 0.0);
  const SolutionField u =
      solve_local(cfg.kernel, grid, zero, exterior, cfg.t_start, cfg.T, cfg.dt, cfg.store_every);

  double pre_max = 0.0;
  double post_min = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < u.frame_count(); ++k) {
    const auto& frame = u.frame(k);
    if (u.time(k) <= kZeroStampFuzz) {
      for (const double v : frame) pre_max = std::max(pre_max, std::abs(v));
    } else {
      post_min = std::min(post_min, *std::min_element(frame.begin(), frame.end()));
    }
  }
  ctx.check_zero("pre_onset_max_abs", pre_max);
  ctx.check_pos("post_onset_min", post_min);

  // Slice quotients over the observation window |x| <= L/2.
  std::vector<std::size_t> mask;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (std::abs(grid.node(i)) <= 0.5 * grid.half_width() + 1e-12) mask.push_back(i);
  }
  double sup_all = 0.0;
  for (std::size_t k = 0; k < u.frame_count(); ++k) {
    if (u.time(k) <= kZeroStampFuzz) continue;
    const auto& frame = u.frame(k);
    for (const std::size_t i : mask) sup_all = std::max(sup_all, frame[i]);
  }
  const auto quotient = [&](double t) {
    const auto& frame = u.frame_at(t);
    double lowest = std::numeric_limits<double>::infinity();
    for (const std::size_t i : mask) lowest = std::min(lowest, frame[i]);
    return sup_all / lowest;
  };

  std::vector<double> slice_q;
  for (const double t : cfg.sweeps.taus) {
    slice_q.push_back(quotient(t));
    ctx.info("quotient_at_t_" + fmt(t), slice_q.back());
  }
  ctx.check_ge("quotient_growth", slice_q.front() / slice_q.back(), ctx.ceiling("growth_min"));

  Csv qcsv("t,quotient");
  const double stride = std::max(cfg.T / 100.0, cfg.dt * static_cast<double>(cfg.store_every));
  for (double t = stride; t <= cfg.T + kWindowFuzz; t += stride) qcsv.row({t, quotient(t)});
  ctx.csvs.emplace_back("slice_quotients.csv", std::move(qcsv.text));

  Csv scsv("t,x,u");
  for (const double t : cfg.sweeps.taus) {
    const auto& frame = u.frame_at(t);
    for (const std::size_t i : mask) scsv.row({t, grid.node(i), frame[i]});
  }
  ctx.csvs.emplace_back("slices.csv", std::move(scsv.text));
}

// ---------------------------------------------------------------------------
// E6: local Gaussian decay versus nonlocal Poisson decay at a distant center.
// ---------------------------------------------------------------------------

void run_e6(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::zero_exterior);

  const SolutionField gau = inject_shifted(grid, cfg.T, cfg.dt, cfg.store_every, true);
  const SolutionField poi = inject_shifted(grid, cfg.T, cfg.dt, cfg.store_every, false);
  const double inv2s = 1.0 / (2.0 * gau.kernel().s);

  const bool single = cfg.sweeps.taus.size() * cfg.sweeps.x0s.size() == 1;
  std::size_t idx = 0;
  for (const double x0 : cfg.sweeps.x0s) {
    for (const double tau : cfg.sweeps.taus) {
      const CylinderSpec early{tau, x0, 0.25, 1.0, inv2s, 1.0};
      const CylinderSpec late{tau, x0, 0.75, 1.0, inv2s, 1.0};
      const double qg = cylinder_sup(gau, early) / cylinder_inf(gau, late);
      const double qp = cylinder_sup(poi, early) / cylinder_inf(poi, late);
      const std::string suffix = single ? "" : "_" + std::to_string(idx++);
      ctx.check_ge("gaussian_quotient" + suffix, qg, ctx.ceiling("gaussian_min"));
      ctx.check_le("poisson_quotient" + suffix, qp, ctx.ceiling("poisson_max"));
    }
  }

  Csv csv("x,gaussian,poisson");
  const double x0 = cfg.sweeps.x0s.front();
  const auto& gframe = gau.frame_at(cfg.T);
  const auto& pframe = poi.frame_at(cfg.T);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double x = grid.node(i);
    if (std::abs(x - x0) <= 3.0) csv.row({x, gframe[i], pframe[i]});
  }
  ctx.csvs.emplace_back("contrast_profiles.csv", std::move(csv.text));
}

// ---------------------------------------------------------------------------
// E7: ball-mean-to-inf verdicts over a kernel sweep, initial-mass propagation,
// and the measure-to-pointwise positivity expansion under refinement.
// ---------------------------------------------------------------------------

void run_e7(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::truncated_global);
  const auto bump = bump_datum(grid, grid.center_index());

  std::vector<std::pair<std::string, KernelSpec>> kernels;
  kernels.emplace_back("FRAC", cfg.kernel);
  if (!cfg.oracle_injection) {
    kernels.emplace_back("CHECKERBOARD", checkerboard_companion(cfg.kernel, 1e9));
    kernels.emplace_back("OSCILLATING", oscillating_companion(cfg.kernel));
  }

  std::optional<SolutionField> frac_field;
  for (const auto& [label, spec] : kernels) {
    SolutionField field =
        cfg.oracle_injection
            ? inject_poisson(grid, cfg.T, cfg.dt, cfg.store_every)
            : solve_cauchy(spec, grid, bump, cfg.T, cfg.dt, cfg.store_every);
    ctx.add_report("IWH_" + label, verdict_theorem(field, TheoremId::thm_iwh, ctx.sweep("iwh")));
    if (label == "FRAC") frac_field = std::move(field);
  }

  // Initial mass on B_1/2 keeps at least half its value as B_1 mass on (0,1/4].
  const double x0 = cfg.sweeps.x0s.empty() ? 0.0 : cfg.sweeps.x0s.front();
  ctx.add_report("LEM_L1_PROP",
                 verdict_theorem(*frac_field, TheoremId::lem_l1_prop,
                                 VerdictSweep{{0.25}, {x0}, ctx.ceiling("lem_l1"), 3.0}));

  if (cfg.oracle_injection) return;

  // Positivity expansion: indicator data of shrinking support, fitted decay
  // exponent, and refinement stability of (eta, p).
  std::array<double, 2> etas{};
  std::array<double, 2> ps{};
  Csv csv("cells,alpha,predicted,measured");
  const std::array<std::size_t, 2> cell_counts{cfg.cells, 2 * cfg.cells - 1};
  for (std::size_t gi = 0; gi < cell_counts.size(); ++gi) {
    const Grid ge(cfg.half_width, cell_counts[gi], ExteriorPolicy::truncated_global);
    std::vector<SolutionField> fields;
    for (const double alpha : kExpansionAlphas) {
      fields.push_back(solve_cauchy(cfg.kernel, ge,
                                    indicator_datum(ge, x0, alpha * kExpansionR, kExpansionLevel),
                                    kExpansionT, kExpansionDt, kExpansionStore));
    }
    const HarnackReport rep = verdict_expansion_of_positivity(
        fields, kExpansionAlphas, kExpansionR, kExpansionLevel, x0, ctx.ceiling("exp_pos"));
    etas[gi] = rep.extras.at("eta");
    ps[gi] = rep.extras.at("p");
    for (const auto& inst : rep.instances) {
      csv.row({static_cast<double>(cell_counts[gi]), inst.tau, inst.lhs, inst.rhs});
    }
    ctx.add_report(gi == 0 ? "PROP_EXP_POS_BASE" : "PROP_EXP_POS_FINE", rep);
  }
  ctx.check_le("expansion_eta_refinement_rel", std::abs(etas[1] / etas[0] - 1.0),
               ctx.ceiling("refine_rel"));
  ctx.check_le("expansion_p_refinement_rel", std::abs(ps[1] / ps[0] - 1.0),
               ctx.ceiling("refine_rel"));
  ctx.csvs.emplace_back("expansion.csv", std::move(csv.text));
}

// ---------------------------------------------------------------------------
// E8: transition-density tables — positivity, mass, composition, duality,
// envelope; cell-boundary and box-size sensitivities reported unga­ted.
// ---------------------------------------------------------------------------

void run_e8(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Grid grid = make_grid(cfg, ExteriorPolicy::zero_exterior);

  std::vector<std::size_t> sources;
  for (const double x0 : cfg.sweeps.x0s) sources.push_back(grid.nearest_index(x0));

  // ~100 evaluation times, each a whole number of steps.
  const auto stride = static_cast<std::size_t>(
      std::max<long long>(1, std::llround(cfg.T / (100.0 * cfg.dt))));
  std::vector<double> times;
  for (std::size_t k = stride;; k += stride) {
    const double t = static_cast<double>(k) * cfg.dt;
    if (t > cfg.T + kWindowFuzz) break;
    times.push_back(t);
  }

  const KernelSpec osc = oscillating_companion(cfg.kernel);
  const KernelSpec cb = checkerboard_companion(cfg.kernel, 0.25);

  const HeatKernelTable table = compute_table(cfg.kernel, grid, 0.0, times, sources, cfg.dt);
  const HeatKernelTable table_osc = compute_table(osc, grid, 0.0, times, sources, cfg.dt);

  const double slack = ctx.ceiling("mass_slack");
  const MassReport mass = check_mass(table, slack);
  ctx.add("frac_mass", mass.max_mass, "<= 1 + " + fmt(slack) + ", nonneg, nonincreasing",
          mass.pass);
  const MassReport mass_osc = check_mass(table_osc, slack);
  ctx.add("oscillating_mass", mass_osc.max_mass,
          "<= 1 + " + fmt(slack) + ", nonneg, nonincreasing", mass_osc.pass);

  const double t_mid = times[times.size() / 2 - 1];
  const double t_end = times.back();
  ctx.check_le("frac_ck_rel", check_chapman_kolmogorov(table, t_mid, t_end).max_rel_err,
               ctx.ceiling("ck_rel"));
  ctx.check_le("oscillating_ck_rel",
               check_chapman_kolmogorov(table_osc, t_mid, t_end).max_rel_err,
               ctx.ceiling("ck_osc_rel"));
  // Piecewise-constant-in-time amplitudes compose with an O(dt) seam at cell
  // boundaries; reported but not gated.
  const HeatKernelTable table_cb = compute_table(cb, grid, 0.0, times, sources, cfg.dt);
  ctx.info("checkerboard_ck_rel", check_chapman_kolmogorov(table_cb, t_mid, t_end).max_rel_err);

  const std::vector<double> start_only{0.0};
  ctx.check_le(
      "frac_duality_rel",
      check_duality(table, compute_dual_table(cfg.kernel, grid, t_mid, start_only, sources,
                                              cfg.dt))
          .max_rel_err,
      ctx.ceiling("duality_rel"));
  ctx.check_le(
      "oscillating_duality_rel",
      check_duality(table_osc,
                    compute_dual_table(osc, grid, t_mid, start_only, sources, cfg.dt))
          .max_rel_err,
      ctx.ceiling("duality_rel"));

  const double env_c = ctx.ceiling("envelope_c");
  const EnvelopeReport env = check_envelope(table, env_c);
  ctx.add("frac_envelope_C", env.measured_C, "<= " + fmt(env_c),
          env.holds_upper && env.holds_lower);
  const EnvelopeReport env_osc = check_envelope(table_osc, env_c);
  ctx.add("oscillating_envelope_C", env_osc.measured_C, "<= " + fmt(env_c),
          env_osc.holds_upper && env_osc.holds_lower);

  // Box-size sensitivity: rerun the centered column on a doubled box and
  // compare the mass captured by |x| <= L/2 at the final time.
  {
    const Grid big(2.0 * cfg.half_width, 2 * cfg.cells - 1, ExteriorPolicy::zero_exterior);
    const std::vector<std::size_t> center{big.nearest_index(cfg.sweeps.x0s.front())};
    const HeatKernelTable table_big =
        compute_table(cfg.kernel, big, 0.0, {t_end}, center, cfg.dt);
    const auto window_mass = [&](const HeatKernelTable& tb, std::size_t source,
                                 std::size_t time_idx) {
      double m = 0.0;
      for (std::size_t i = 0; i < tb.grid.size(); ++i) {
        if (std::abs(tb.grid.node(i)) <= 0.5 * cfg.half_width) {
          m += tb.grid.spacing() * tb.value(source, time_idx, i);
        }
      }
      return m;
    };
    const double m_small = window_mass(table, 0, times.size() - 1);
    const double m_big = window_mass(table_big, 0, 0);
    ctx.info("box_doubling_mass_rel", std::abs(m_big / m_small - 1.0));
  }

  Csv csv("t,x,p");
  for (const double t : {0.1 * cfg.T, 0.5 * cfg.T, cfg.T}) {
    const std::size_t k = table.time_index(t);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double x = grid.node(i);
      if (std::abs(x) <= 0.5 * grid.half_width()) csv.row({table.times[k], x, table.value(0, k, i)});
    }
  }
  ctx.csvs.emplace_back("density_centered.csv", std::move(csv.text));
}

// ---------------------------------------------------------------------------
// E9: nonlocal energy against cylinder q-means, tau sweep + h stability.
// ---------------------------------------------------------------------------

void run_e9(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const double x0 = cfg.sweeps.x0s.empty() ? 0.0 : cfg.sweeps.x0s.front();
  const double inv2s = 1.0 / (2.0 * cfg.kernel.s);

  const std::array<std::size_t, 2> cell_counts{(cfg.cells + 1) / 2, cfg.cells};
  // ratios[grid][tau][q]
  std::vector<std::vector<std::array<double, 2>>> ratios(
      2, std::vector<std::array<double, 2>>(cfg.sweeps.taus.size()));
  Csv csv("cells,tau,q,lhs,rhs,ratio");
  for (std::size_t gi = 0; gi < cell_counts.size(); ++gi) {
    const Grid grid(cfg.half_width, cell_counts[gi], ExteriorPolicy::truncated_global);
    const SolutionField field =
        cfg.oracle_injection
            ? inject_poisson(grid, cfg.T, cfg.dt, cfg.store_every)
            : solve_cauchy(cfg.kernel, grid, wide_datum(grid), cfg.T, cfg.dt, cfg.store_every);
    for (std::size_t ti = 0; ti < cfg.sweeps.taus.size(); ++ti) {
      const double tau = cfg.sweeps.taus[ti];
      for (std::size_t qi = 0; qi < kEnergyQs.size(); ++qi) {
        const EnergyReport er =
            energy_triple_integral(field, tau, x0, std::pow(tau, inv2s), kEnergyQs[qi]);
        ratios[gi][ti][qi] = er.ratio;
        csv.row({static_cast<double>(cell_counts[gi]), tau, kEnergyQs[qi], er.lhs, er.rhs_base,
                 er.ratio});
      }
    }
  }
  ctx.csvs.emplace_back("energy.csv", std::move(csv.text));

  double max_ratio = 0.0;
  double worst_rel = 0.0;
  for (std::size_t ti = 0; ti < cfg.sweeps.taus.size(); ++ti) {
    for (std::size_t qi = 0; qi < kEnergyQs.size(); ++qi) {
      max_ratio = std::max(max_ratio, ratios[1][ti][qi]);
      worst_rel = std::max(worst_rel, std::abs(ratios[1][ti][qi] / ratios[0][ti][qi] - 1.0));
    }
  }
  ctx.check_le("energy_ratio_max", max_ratio, ctx.ceiling("energy_max"));
  ctx.check_le("energy_h_stability_rel", worst_rel, ctx.ceiling("h_rel"));
}

// ---------------------------------------------------------------------------
// E10: half-to-full cylinder power-mean quotients over a kernel sweep.
// ---------------------------------------------------------------------------

void run_e10(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const double x0 = cfg.sweeps.x0s.empty() ? 0.0 : cfg.sweeps.x0s.front();

  std::vector<std::pair<std::string, KernelSpec>> kernels;
  if (cfg.oracle_injection) {
    kernels.emplace_back("EXACT", oracle_kernel());
  } else {
    kernels.emplace_back("FRAC", cfg.kernel);
    KernelSpec doubled = cfg.kernel;
    const double a = cfg.kernel.param("a", 1.0);
    doubled.lambda = doubled.Lambda = 2.0 * a;
    doubled.family_params["a"] = 2.0 * a;
    kernels.emplace_back("FRAC_2A", doubled);
    kernels.emplace_back("CHECKERBOARD", checkerboard_companion(cfg.kernel, 0.25));
    kernels.emplace_back("CHECKERBOARD_SPACE", checkerboard_companion(cfg.kernel, 1e9));
    kernels.emplace_back("OSCILLATING", oscillating_companion(cfg.kernel));
  }

  const auto field_for = [&](const KernelSpec& spec, std::size_t cells) {
    const Grid grid(cfg.half_width, cells, ExteriorPolicy::truncated_global);
    return cfg.oracle_injection
               ? inject_poisson(grid, cfg.T, cfg.dt, cfg.store_every)
               : solve_cauchy(spec, grid, wide_datum(grid), cfg.T, cfg.dt, cfg.store_every);
  };

  double max_ratio = 0.0;
  std::vector<double> base_ratios;
  Csv csv("kernel,cells,tau,ratio");
  for (const auto& [label, spec] : kernels) {
    const SolutionField field = field_for(spec, cfg.cells);
    for (const double tau : cfg.sweeps.taus) {
      const double r = reverse_holder_ratio(field, kHolderSigma, kHolderQ, tau, x0);
      max_ratio = std::max(max_ratio, r);
      if (&spec == &kernels.front().second) base_ratios.push_back(r);
      csv.row(label, {static_cast<double>(cfg.cells), tau, r});
    }
  }
  ctx.check_le("holder_ratio_max", max_ratio, ctx.ceiling("rh_max"));

  // h-stability on the primary kernel.
  {
    const SolutionField fine = field_for(kernels.front().second, 2 * cfg.cells - 1);
    double worst_rel = 0.0;
    for (std::size_t ti = 0; ti < cfg.sweeps.taus.size(); ++ti) {
      const double r =
          reverse_holder_ratio(fine, kHolderSigma, kHolderQ, cfg.sweeps.taus[ti], x0);
      worst_rel = std::max(worst_rel, std::abs(r / base_ratios[ti] - 1.0));
      csv.row(kernels.front().first, {static_cast<double>(2 * cfg.cells - 1),
                                      cfg.sweeps.taus[ti], r});
    }
    ctx.check_le("holder_h_stability_rel", worst_rel, ctx.ceiling("h_rel"));
  }
  ctx.csvs.emplace_back("reverse_holder.csv", std::move(csv.text));
}

// ---------------------------------------------------------------------------
// LEMMAS: randomized algebraic estimates and the weighted tail integral.
// ---------------------------------------------------------------------------

void run_lemmas(RunContext& ctx) {
  const ExperimentConfig& cfg = ctx.cfg;
  const Interval positive_decades{std::exp(-6.0), std::exp(6.0)};
  const Interval eta_range{0.0, 3.0};
  const Interval symmetric{-3.0, 3.0};

  const std::array<double, 3> eps_values{0.1, 0.5, 0.9};
  for (std::size_t k = 0; k < eps_values.size(); ++k) {
    SamplePlan plan{kSampleCount, cfg.seed + k, {{"u", positive_decades}, {"eta", eta_range}}};
    const AlgebraicEstimateReport rep = check_algebraic_estimate(eps_values[k], plan);
    ctx.check_zero("moser_pairing_violations_eps_" + fmt(eps_values[k]),
                   static_cast<double>(rep.violations));
  }

  {
    SamplePlan plan{kSampleCount,
                    cfg.seed + 101,
                    {{"t", positive_decades}, {"s", positive_decades}, {"eta", eta_range}}};
    const GenauxReport rep = check_genaux(plan);
    ctx.check_zero("weighted_difference_lower_violations",
                   static_cast<double>(rep.violations_lower));
    ctx.check_zero("weighted_difference_upper_violations",
                   static_cast<double>(rep.violations_upper));
  }

  {
    SamplePlan plan{kSampleCount,
                    cfg.seed + 202,
                    {{"phi", symmetric}, {"u", symmetric}, {"xi", symmetric}}};
    const ChainRuleReport rep = check_chain_rule_identity(plan);
    ctx.check_le("chain_rule_rel_residual",
                 rep.max_abs_residual / std::max(rep.scale, 1.0), 1e-12);
  }

  // int_{|y|>1} (1+|y|)^{-2} |y|^{-2} dy = 3 - 4 log 2 by partial fractions.
  const double exact_at_zero = 3.0 - 4.0 * std::numbers::ln2;
  const double at_zero = tail_weight_integral(0.0, cfg.kernel.s, cfg.kernel.dim, 1e-9);
  ctx.check_le("tail_integral_x0_abs_err", std::abs(at_zero - exact_at_zero),
               ctx.ceiling("tail_abs_tol"));

  const std::array<double, 5> xs{0.0, 1.0, 10.0, 100.0, 1000.0};
  double lo = std::numeric_limits<double>::infinity();
  double hi = 0.0;
  Csv csv("x,integral,weighted");
  for (const double x : xs) {
    const double value = tail_weight_integral(x, cfg.kernel.s, cfg.kernel.dim, 1e-9);
    const double weighted = value * (1.0 + x) * (1.0 + x);
    lo = std::min(lo, weighted);
    hi = std::max(hi, weighted);
    csv.row({x, value, weighted});
  }
  ctx.check_ge("tail_weighted_min", lo, ctx.ceiling("weighted_lo"));
  ctx.check_le("tail_weighted_max", hi, ctx.ceiling("weighted_hi"));
  ctx.csvs.emplace_back("tail_weight.csv", std::move(csv.text));
}

ExperimentResult finish(RunContext&& ctx) {
  ExperimentResult result;
  result.pass = true;
  for (const auto& check : ctx.checks) result.pass = result.pass && check.pass;

  ordered_json doc;
  doc["experiment"] = experiment_name(ctx.cfg.experiment);
  doc["pass"] = result.pass;
  doc["checks"] = ordered_json::array();
  for (const auto& check : ctx.checks) {
    ordered_json row;
    row["name"] = check.name;
    row["value"] = check.value;
    row["gate"] = check.gate;
    row["pass"] = check.pass;
    doc["checks"].push_back(row);
    result.summary.push_back(std::string(check.pass ? "[PASS] " : "[FAIL] ") + check.name +
                             " = " + fmt(check.value) + " (" + check.gate + ")");
  }
  doc["reports"] = std::move(ctx.reports);
  doc["config"] = ordered_json::parse(config_to_json(ctx.cfg));
  result.report_json = doc.dump(2) + "\n";
  result.csv_files = std::move(ctx.csvs);
  return result;
}

}  // namespace

std::string experiment_name(ExperimentId id) {
  switch (id) {
    case ExperimentId::e1_time_insensitive: return "E1_time_insensitive";
    case ExperimentId::e2_elliptic: return "E2_elliptic";
    case ExperimentId::e3_weighted_l1: return "E3_weighted_L1";
    case ExperimentId::e4_psi_pairing: return "E4_psi_pairing";
    case ExperimentId::e5_counterexample: return "E5_counterexample";
    case ExperimentId::e6_gaussian_contrast: return "E6_gaussian_contrast";
    case ExperimentId::e7_improved_weak_harnack: return "E7_improved_weak_harnack";
    case ExperimentId::e8_fundamental_solution: return "E8_fundamental_solution";
    case ExperimentId::e9_energy_decay: return "E9_energy_decay";
    case ExperimentId::e10_reverse_holder: return "E10_reverse_holder";
    case ExperimentId::lemmas: return "LEMMAS";
  }
  throw std::logic_error("unreachable experiment id");
}

ExperimentId experiment_from_name(const std::string& name) {
  static const std::map<std::string, ExperimentId> table = {
      {"E1_time_insensitive", ExperimentId::e1_time_insensitive},
      {"E2_elliptic", ExperimentId::e2_elliptic},
      {"E3_weighted_L1", ExperimentId::e3_weighted_l1},
      {"E4_psi_pairing", ExperimentId::e4_psi_pairing},
      {"E5_counterexample", ExperimentId::e5_counterexample},
      {"E6_gaussian_contrast", ExperimentId::e6_gaussian_contrast},
      {"E7_improved_weak_harnack", ExperimentId::e7_improved_weak_harnack},
      {"E8_fundamental_solution", ExperimentId::e8_fundamental_solution},
      {"E9_energy_decay", ExperimentId::e9_energy_decay},
      {"E10_reverse_holder", ExperimentId::e10_reverse_holder},
      {"LEMMAS", ExperimentId::lemmas},
  };
  const auto it = table.find(name);
  if (it == table.end()) throw std::invalid_argument("unknown experiment id: " + name);
  return it->second;
}

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(summarize(issues)), issues_(std::move(issues)) {}

std::string ConfigError::summarize(const std::vector<ConfigIssue>& issues) {
  std::string text = "invalid config";
  for (const auto& issue : issues) {
    text += "; " + issue.path + ": " + issue.message;
  }
  return text;
}

ExperimentConfig default_config(ExperimentId id) {
  ExperimentConfig cfg;
  cfg.experiment = id;
  cfg.kernel = oracle_kernel();
  cfg.sweeps = {{0.25, 0.5, 1.0}, {0.0}};
  cfg.output_dir = "out/" + experiment_name(id);
  switch (id) {
    case ExperimentId::e1_time_insensitive: {
      KernelSpec rough;
      rough.s = 0.5;
      rough.lambda = 1.0;
      rough.Lambda = 2.0;
      rough.family = KernelFamily::checkerboard;
      rough.family_params = {{"cell_x", 1.0}, {"cell_t", 0.25}};
      cfg.kernel_b = rough;
      cfg.hygiene = true;
      cfg.ceilings = {{"oracle_thm_0_sup", 4.4},   {"oracle_thm_0_inf", 2.3},
                      {"oracle_thm_0_harnack", 9.0}, {"spot_tol", 0.02},
                      {"solver_sup_rel", 0.05},    {"solver_thm_0_sup", 6.0},
                      {"solver_thm_0_inf", 4.5},  {"solver_thm_0_harnack", 14.0},
                      {"rough_thm_general", 6.0}, {"hygiene_dt_rel", 0.05},
                      {"hygiene_h_rel", 0.10}};
      break;
    }
    case ExperimentId::e2_elliptic:
      cfg.ceilings = {{"oracle_elliptic", 2.5}, {"solver_elliptic", 3.0}};
      break;
    case ExperimentId::e3_weighted_l1:
      cfg.store_every = 10;
      cfg.sweeps.taus = {0.1, 1.0};
      cfg.ceilings = {{"prop_l1", 1.5}, {"oracle_ratio", 1.05}};
      break;
    case ExperimentId::e4_psi_pairing:
      cfg.store_every = 10;
      cfg.sweeps.taus = {1.0};
      cfg.ceilings = {{"psi_lo", 0.2},
                      {"psi_hi", 3.0},
                      {"pairing_drift", 0.001},
                      {"dual_oracle_rel", 0.01},
                      {"shift_rel", 1e-12}};
      break;
    case ExperimentId::e5_counterexample:
      cfg.half_width = 16.0;
      cfg.cells = 641;
      cfg.t_start = -16.0;
      cfg.sweeps.taus = {0.05, 0.25, 1.0};
      cfg.ceilings = {{"growth_min", 10.0}};
      break;
    case ExperimentId::e6_gaussian_contrast:
      cfg.cells = 801;
      cfg.sweeps = {{1.0}, {10.0}};
      cfg.ceilings = {{"gaussian_min", 400.0}, {"poisson_max", 3.0}};
      break;
    case ExperimentId::e7_improved_weak_harnack:
      cfg.half_width = 20.0;
      cfg.cells = 801;
      cfg.T = 8.0;
      cfg.dt = 2e-3;
      cfg.store_every = 5;
      cfg.sweeps.taus = {0.5, 0.75, 1.0};
      cfg.ceilings = {{"iwh", 25.0}, {"lem_l1", 1.0}, {"exp_pos", 1.5}, {"refine_rel", 0.10}};
      break;
    case ExperimentId::e8_fundamental_solution:
      cfg.cells = 801;
      cfg.sweeps = {{1.0}, {0.0, 5.0, -10.0}};
      cfg.ceilings = {{"ck_rel", 0.02},
                      {"ck_osc_rel", 0.03},
                      {"duality_rel", 0.03},
                      {"envelope_c", 4.0},
                      {"mass_slack", 1e-8}};
      break;
    case ExperimentId::e9_energy_decay:
      // Energy cylinders have radius tau^{1/2s}; a narrow box with fine
      // spacing keeps even the smallest ball dozens of cells wide.
      cfg.half_width = 10.0;
      cfg.T = 2.0;
      cfg.store_every = 10;
      cfg.sweeps.taus = {0.8, 0.4, 0.2};
      cfg.ceilings = {{"energy_max", 0.2}, {"h_rel", 0.12}};
      break;
    case ExperimentId::e10_reverse_holder:
      cfg.half_width = 10.0;
      cfg.cells = 801;
      cfg.store_every = 10;
      cfg.sweeps.taus = {1.0, 0.5, 0.25};
      cfg.ceilings = {{"rh_max", 2.0}, {"h_rel", 0.05}};
      break;
    case ExperimentId::lemmas:
      cfg.ceilings = {{"tail_abs_tol", 1e-8}, {"weighted_lo", 0.1}, {"weighted_hi", 10.0}};
      break;
  }
  return cfg;
}

namespace {

void parse_kernel(const json& node, const std::string& path, KernelSpec& spec,
                  std::vector<ConfigIssue>& issues) {
  if (!node.is_object()) {
    issues.push_back({path, "must be an object"});
    return;
  }
  static const std::set<std::string> keys = {"s", "dim", "lambda", "Lambda", "family", "params"};
  for (auto it = node.begin(); it != node.end(); ++it) {
    if (!keys.count(it.key())) issues.push_back({path + "." + it.key(), "unknown key"});
  }
  if (node.contains("family")) {
    if (!node["family"].is_string()) {
      issues.push_back({path + ".family", "must be a string"});
    } else {
      try {
        spec.family = family_from_name(node["family"].get<std::string>());
      } catch (const std::invalid_argument& e) {
        issues.push_back({path + ".family", e.what()});
      }
    }
  }
  if (node.contains("s")) {
    if (!node["s"].is_number()) {
      issues.push_back({path + ".s", "must be a number"});
    } else {
      const double s = node["s"].get<double>();
      if (!(s > 0.0 && s < 1.0)) {
        issues.push_back({path + ".s", "s must lie in (0,1)"});
      } else {
        spec.s = s;
      }
    }
  }
  if (node.contains("dim")) {
    if (!node["dim"].is_number_integer() || node["dim"].get<int>() != 1) {
      issues.push_back({path + ".dim", "only dim = 1 is supported"});
    } else {
      spec.dim = 1;
    }
  }
  for (const char* key : {"lambda", "Lambda"}) {
    if (!node.contains(key)) continue;
    if (!node[key].is_number()) {
      issues.push_back({path + "." + key, "must be a number"});
      continue;
    }
    const double v = node[key].get<double>();
    if (!(v > 0.0)) {
      issues.push_back({path + "." + key, "must be positive"});
    } else {
      (key[0] == 'l' ? spec.lambda : spec.Lambda) = v;
    }
  }
  if (node.contains("params")) {
    if (!node["params"].is_object()) {
      issues.push_back({path + ".params", "must be an object of numbers"});
    } else {
      spec.family_params.clear();
      for (auto it = node["params"].begin(); it != node["params"].end(); ++it) {
        if (!it.value().is_number()) {
          issues.push_back({path + ".params." + it.key(), "must be a number"});
        } else {
          spec.family_params[it.key()] = it.value().get<double>();
        }
      }
    }
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    issues.push_back({path, e.what()});
  }
}

}  // namespace

ExperimentConfig validate_config(const std::string& raw_json) {
  const auto fail = [](std::string path, std::string message) {
    throw ConfigError(std::vector<ConfigIssue>{{std::move(path), std::move(message)}});
  };
  json doc;
  try {
    doc = json::parse(raw_json);
  } catch (const json::parse_error& e) {
    fail("$", std::string("not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) fail("$", "config must be a JSON object");
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) {
    fail("experiment", "required string naming the experiment");
  }
  ExperimentId id = ExperimentId::lemmas;
  try {
    id = experiment_from_name(doc["experiment"].get<std::string>());
  } catch (const std::invalid_argument& e) {
    fail("experiment", e.what());
  }

  ExperimentConfig cfg = default_config(id);
  std::vector<ConfigIssue> issues;

  static const std::set<std::string> top_keys = {
      "experiment", "kernel",  "kernel_b",         "grid",    "T",
      "dt",         "store_every", "t_start",      "sweeps",  "ceilings",
      "oracle_injection", "hygiene", "seed",       "output_dir", "notes"};
  for (auto it = doc.begin(); it != doc.end(); ++it) {
    if (!top_keys.count(it.key())) issues.push_back({it.key(), "unknown key"});
  }

  const auto positive_number = [&](const char* key, double& out) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) {
      issues.push_back({key, "must be a number"});
    } else if (const double v = doc[key].get<double>(); !(v > 0.0)) {
      issues.push_back({key, "must be positive"});
    } else {
      out = v;
    }
  };
  positive_number("T", cfg.T);
  positive_number("dt", cfg.dt);

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) {
      issues.push_back({"grid", "must be an object"});
    } else {
      for (auto it = g.begin(); it != g.end(); ++it) {
        if (it.key() != "half_width" && it.key() != "cells") {
          issues.push_back({"grid." + it.key(), "unknown key"});
        }
      }
      if (g.contains("half_width")) {
        if (!g["half_width"].is_number() || !(g["half_width"].get<double>() > 0.0)) {
          issues.push_back({"grid.half_width", "must be positive"});
        } else {
          cfg.half_width = g["half_width"].get<double>();
        }
      }
      if (g.contains("cells")) {
        if (!g["cells"].is_number_integer() || g["cells"].get<long long>() < 17 ||
            g["cells"].get<long long>() % 2 == 0) {
          issues.push_back({"grid.cells", "must be odd and at least 17"});
        } else {
          cfg.cells = g["cells"].get<std::size_t>();
        }
      }
    }
  }

  if (doc.contains("store_every")) {
    if (!doc["store_every"].is_number_integer() || doc["store_every"].get<long long>() < 1) {
      issues.push_back({"store_every", "must be a positive integer"});
    } else {
      cfg.store_every = doc["store_every"].get<std::size_t>();
    }
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) {
      issues.push_back({"seed", "must be a nonnegative integer"});
    } else {
      cfg.seed = doc["seed"].get<std::uint64_t>();
    }
  }
  if (doc.contains("t_start")) {
    if (id != ExperimentId::e5_counterexample) {
      issues.push_back({"t_start", "only used by E5_counterexample"});
    } else if (!doc["t_start"].is_number()) {
      issues.push_back({"t_start", "must be a number"});
    } else {
      cfg.t_start = doc["t_start"].get<double>();
    }
  }
  if (doc.contains("oracle_injection")) {
    if (!doc["oracle_injection"].is_boolean()) {
      issues.push_back({"oracle_injection", "must be a boolean"});
    } else {
      cfg.oracle_injection = doc["oracle_injection"].get<bool>();
    }
  }
  if (doc.contains("hygiene")) {
    if (id != ExperimentId::e1_time_insensitive) {
      issues.push_back({"hygiene", "only used by E1_time_insensitive"});
    } else if (!doc["hygiene"].is_boolean()) {
      issues.push_back({"hygiene", "must be a boolean"});
    } else {
      cfg.hygiene = doc["hygiene"].get<bool>();
    }
  }
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string() || doc["output_dir"].get<std::string>().empty()) {
      issues.push_back({"output_dir", "must be a nonempty string"});
    } else {
      cfg.output_dir = doc["output_dir"].get<std::string>();
    }
  }
  if (doc.contains("notes")) {
    if (!doc["notes"].is_string()) {
      issues.push_back({"notes", "must be a string"});
    } else {
      cfg.notes = doc["notes"].get<std::string>();
    }
  }

  if (doc.contains("kernel")) parse_kernel(doc["kernel"], "kernel", cfg.kernel, issues);
  if (doc.contains("kernel_b")) {
    if (id != ExperimentId::e1_time_insensitive) {
      issues.push_back({"kernel_b", "only used by E1_time_insensitive"});
    } else {
      if (!cfg.kernel_b.has_value()) cfg.kernel_b = oracle_kernel();
      parse_kernel(doc["kernel_b"], "kernel_b", *cfg.kernel_b, issues);
    }
  }

  if (doc.contains("sweeps")) {
    const json& sw = doc["sweeps"];
    if (!sw.is_object()) {
      issues.push_back({"sweeps", "must be an object"});
    } else {
      for (auto it = sw.begin(); it != sw.end(); ++it) {
        if (it.key() != "taus" && it.key() != "x0s") {
          issues.push_back({"sweeps." + it.key(), "unknown key"});
        }
      }
      const auto read_list = [&](const char* key, std::vector<double>& out, bool positive) {
        if (!sw.contains(key)) return;
        if (!sw[key].is_array() || sw[key].empty()) {
          issues.push_back({std::string("sweeps.") + key, "must be a nonempty array"});
          return;
        }
        std::vector<double> values;
        for (const auto& v : sw[key]) {
          if (!v.is_number()) {
            issues.push_back({std::string("sweeps.") + key, "entries must be numbers"});
            return;
          }
          values.push_back(v.get<double>());
          if (positive && !(values.back() > 0.0)) {
            issues.push_back({std::string("sweeps.") + key, "entries must be positive"});
            return;
          }
        }
        out = std::move(values);
      };
      read_list("taus", cfg.sweeps.taus, /*positive=*/true);
      read_list("x0s", cfg.sweeps.x0s, /*positive=*/false);
    }
  }

  if (doc.contains("ceilings")) {
    const json& ce = doc["ceilings"];
    if (!ce.is_object()) {
      issues.push_back({"ceilings", "must be an object of positive numbers"});
    } else {
      for (auto it = ce.begin(); it != ce.end(); ++it) {
        if (!cfg.ceilings.count(it.key())) {
          issues.push_back({"ceilings." + it.key(), "unknown ceiling"});
        } else if (!it.value().is_number() || !(it.value().get<double>() > 0.0)) {
          issues.push_back({"ceilings." + it.key(), "must be positive"});
        } else {
          cfg.ceilings[it.key()] = it.value().get<double>();
        }
      }
    }
  }

  // Cross-field rules.
  if (cfg.dt > cfg.T) issues.push_back({"dt", "must not exceed T"});
  const double span = cfg.T - cfg.t_start;
  const double steps = span / cfg.dt;
  if (std::abs(steps - std::llround(steps)) > 1e-6) {
    issues.push_back({"dt", "must divide T - t_start into whole steps"});
  }
  if (id == ExperimentId::e5_counterexample && !(cfg.t_start < 0.0)) {
    issues.push_back({"t_start", "E5 needs pre-onset frames: t_start must be negative"});
  }
  if ((id == ExperimentId::e3_weighted_l1 || id == ExperimentId::e5_counterexample) &&
      !std::is_sorted(cfg.sweeps.taus.begin(), cfg.sweeps.taus.end(), std::less_equal<>())) {
    issues.push_back({"sweeps.taus", "must be strictly ascending for this experiment"});
  }
  if (id == ExperimentId::e9_energy_decay && cfg.cells % 4 != 1) {
    issues.push_back({"grid.cells", "must be 1 mod 4 (the half-resolution companion grid)"});
  }
  if ((id == ExperimentId::e5_counterexample || id == ExperimentId::e8_fundamental_solution ||
       id == ExperimentId::lemmas) &&
      cfg.oracle_injection) {
    issues.push_back({"oracle_injection", "not available for this experiment"});
  }
  if (cfg.hygiene && cfg.oracle_injection) {
    issues.push_back({"hygiene", "requires solver runs (oracle_injection = false)"});
  }
  if (id == ExperimentId::e7_improved_weak_harnack) {
    for (const double R : cfg.sweeps.taus) {
      if (8.0 * std::pow(R, 2.0 * cfg.kernel.s) > cfg.T + kWindowFuzz) {
        issues.push_back({"sweeps.taus", "needs 8 R^{2s} <= T for every radius R"});
        break;
      }
    }
  }

  if (!issues.empty()) throw ConfigError(std::move(issues));
  return cfg;
}

std::string config_to_json(const ExperimentConfig& cfg) {
  ordered_json doc;
  doc["experiment"] = experiment_name(cfg.experiment);
  doc["kernel"] = ordered_json::parse(to_json(cfg.kernel));
  if (cfg.kernel_b.has_value()) doc["kernel_b"] = ordered_json::parse(to_json(*cfg.kernel_b));
  doc["grid"] = {{"half_width", cfg.half_width}, {"cells", cfg.cells}};
  doc["T"] = cfg.T;
  doc["dt"] = cfg.dt;
  doc["store_every"] = cfg.store_every;
  if (cfg.experiment == ExperimentId::e5_counterexample) doc["t_start"] = cfg.t_start;
  doc["sweeps"] = {{"taus", cfg.sweeps.taus}, {"x0s", cfg.sweeps.x0s}};
  doc["ceilings"] = cfg.ceilings;
  doc["oracle_injection"] = cfg.oracle_injection;
  if (cfg.experiment == ExperimentId::e1_time_insensitive) doc["hygiene"] = cfg.hygiene;
  doc["seed"] = cfg.seed;
  doc["output_dir"] = cfg.output_dir;
  doc["notes"] = cfg.notes;
  return doc.dump(2);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  RunContext ctx{cfg, {}, ordered_json::object(), {}};
  switch (cfg.experiment) {
    case ExperimentId::e1_time_insensitive: run_e1(ctx); break;
    case ExperimentId::e2_elliptic: run_e2(ctx); break;
    case ExperimentId::e3_weighted_l1: run_e3(ctx); break;
    case ExperimentId::e4_psi_pairing: run_e4(ctx); break;
    case ExperimentId::e5_counterexample: run_e5(ctx); break;
    case ExperimentId::e6_gaussian_contrast: run_e6(ctx); break;
    case ExperimentId::e7_improved_weak_harnack: run_e7(ctx); break;
    case ExperimentId::e8_fundamental_solution: run_e8(ctx); break;
    case ExperimentId::e9_energy_decay: run_e9(ctx); break;
    case ExperimentId::e10_reverse_holder: run_e10(ctx); break;
    case ExperimentId::lemmas: run_lemmas(ctx); break;
  }
  return finish(std::move(ctx));
}

int write_artifacts(const ExperimentConfig& cfg, const ExperimentResult& result) {
  namespace fs = std::filesystem;
  const fs::path root(cfg.output_dir);
  fs::create_directories(root / "frames");

  {
    std::ofstream out(root / "report.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (root / "report.json").string());
    out << result.report_json;
  }
  for (const auto& [name, contents] : result.csv_files) {
    std::ofstream out(root / "frames" / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + (root / "frames" / name).string());
    out << contents;
  }
  {
    // Wall-clock facts live here so report.json stays rerun-identical.
    std::time_t now = std::time(nullptr);
    std::tm tm_utc{};
    gmtime_r(&now, &tm_utc);
    char stamp[32];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    ordered_json meta;
    meta["written_at"] = stamp;
    meta["threads"] = worker_threads();
    std::ofstream out(root / "meta.json", std::ios::binary);
    out << meta.dump(2) << "\n";
  }
  return result.pass ? 0 : 1;
}

}  // namespace harnack
