#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "harnack/evolution.hpp"
#include "harnack/functionals.hpp"
#include "harnack/oracles.hpp"
#include "json.hpp"

using namespace harnack;

namespace {

KernelSpec oracle_spec() {
  KernelSpec spec;
  spec.family = KernelFamily::frac_laplacian;
  spec.s = 0.5;
  spec.lambda = 0.25;
  spec.Lambda = 0.5;
  spec.family_params["a"] = 1.0 / std::numbers::pi;
  return spec;
}

/// Synthetic field with frames u(t_k, x_i) = values(t_k, x_i); dt equals the
/// stamp spacing so frame_at resolves every stored time.
template <typename F>
SolutionField synthetic_field(const Grid& grid, const std::vector<double>& times, F values) {
  std::vector<std::vector<double>> frames(times.size(), std::vector<double>(grid.size()));
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) frames[k][i] = values(times[k], grid.node(i));
  }
  const double dt = times.size() > 1 ? times[1] - times[0] : 1.0;
  return SolutionField(grid, oracle_spec(), SolveMode::cauchy, dt, times, std::move(frames));
}

std::vector<double> ramp_times(std::size_t count, double step) {
  std::vector<double> times(count);
  for (std::size_t k = 0; k < count; ++k) times[k] = static_cast<double>(k) * step;
  return times;
}

}  // namespace

TEST_CASE("cylinder geometry: radius law and parameter validation") {
  CylinderSpec cyl;
  cyl.tau = 4.0;
  cyl.radius_exponent = 0.5;
  cyl.radius_scale = 2.0;
  CHECK(cyl.radius() == 4.0);
  CHECK(cyl.t_lo() == 1.0);
  CHECK(cyl.t_hi() == 4.0);
  CHECK_NOTHROW(cyl.validate());

  const auto rejects = [](auto mutate) {
    CylinderSpec bad;
    bad.tau = 1.0;
    mutate(bad);
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  };
  rejects([](CylinderSpec& c) { c.tau = 0.0; });
  rejects([](CylinderSpec& c) { c.tau = -1.0; });
  rejects([](CylinderSpec& c) { c.window_lo = c.window_hi; });
  rejects([](CylinderSpec& c) { c.window_lo = -0.1; });
  rejects([](CylinderSpec& c) { c.window_hi = 1.2; });
  rejects([](CylinderSpec& c) { c.radius_scale = 0.0; });
  rejects([](CylinderSpec& c) { c.radius_exponent = 0.0; });
}

TEST_CASE("cylinder extrema on a linear-in-space-and-time field") {
  const Grid grid(2.0, 21, ExteriorPolicy::zero_exterior);
  const auto field =
      synthetic_field(grid, {0.0, 0.5, 1.0}, [](double t, double x) { return 10.0 * t + x; });
  const std::size_t c = grid.center_index();

  CylinderSpec cyl;  // tau = 1, window (0.25, 1], radius 1
  cyl.window_lo = 0.25;

  // Ball |x| <= 1 reaches five nodes either side of the center.
  const double edge = grid.node(c + 5);
  CHECK(edge <= 1.0);
  CHECK(grid.node(c + 6) > 1.0);

  CHECK(cylinder_sup(field, cyl) == doctest::Approx(10.0 + edge).epsilon(1e-13));
  CHECK(cylinder_inf(field, cyl) == doctest::Approx(5.0 - edge).epsilon(1e-13));
  // Symmetric ball: the spatial mean cancels the x term exactly.
  CHECK(cylinder_sup_mean(field, cyl) == doctest::Approx(10.0).epsilon(1e-12));

  SUBCASE("the initial stamp never enters, even with window_lo = 0") {
    CylinderSpec full = cyl;
    full.window_lo = 0.0;
    // u(0, -edge) = -edge would undercut this if t = 0 were admitted.
    CHECK(cylinder_inf(field, full) == doctest::Approx(5.0 - edge).epsilon(1e-13));
  }

  SUBCASE("degenerate selections throw") {
    CylinderSpec gap = cyl;
    gap.window_lo = 0.55;
    gap.window_hi = 0.95;  // stamps are at 0.5 and 1.0 only
    CHECK_THROWS_AS((void)cylinder_sup(field, gap), std::invalid_argument);

    CylinderSpec wide = cyl;
    wide.radius_scale = 10.0;  // ball radius 10 > half-width 2
    CHECK_THROWS_AS((void)cylinder_sup(field, wide), std::invalid_argument);

    CylinderSpec shifted = cyl;
    shifted.x0 = 1.5;  // |x0| + radius = 2.5 pokes outside the box
    CHECK_THROWS_AS((void)cylinder_inf(field, shifted), std::invalid_argument);
  }
}

TEST_CASE("weighted mass of a constant field matches the closed-form integral") {
  const Grid grid(40.0, 1601, ExteriorPolicy::zero_exterior);
  const auto ones = synthetic_field(grid, {0.0, 1.0}, [](double, double) { return 1.0; });

  // int_{-L}^{L} (1+|x|)^{-2} dx = 2L/(1+L); midpoint sums see the kink at 0.
  const double L = grid.half_width();
  CHECK(weighted_l1_mu(ones, 1.0) == doctest::Approx(2.0 * L / (1.0 + L)).epsilon(2e-3));

  // At tau = 1 the parabolic radius is 1, so the tail functional reduces to
  // tau * (the same weighted sum).
  CHECK(weighted_tail_integral(ones, 1.0, 0.0) ==
        doctest::Approx(weighted_l1_mu(ones, 1.0)).epsilon(1e-14));

  CHECK_THROWS_AS((void)weighted_tail_integral(ones, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS((void)weighted_l1_mu(ones, 3.0), std::invalid_argument);  // no such stamp
}

TEST_CASE("weighted mass with matched-decay closure reproduces the exact kernel value") {
  const Grid grid(40.0, 1601, ExteriorPolicy::truncated_global);
  const auto field = synthetic_field(grid, {0.0, 0.5, 1.0}, [](double t, double x) {
    return t > 0.0 ? poisson_kernel(t, x) : 0.0;
  });
  CHECK(weighted_l1_mu(field, 1.0) ==
        doctest::Approx(poisson_weighted_l1(1.0)).epsilon(5e-3));
  CHECK(poisson_weighted_l1(1.0) ==
        doctest::Approx(1.0 / std::numbers::pi).epsilon(1e-13));
}

TEST_CASE("half-to-full cylinder power-mean quotient on a constant field") {
  const Grid grid(4.0, 41, ExteriorPolicy::zero_exterior);
  const auto ones = synthetic_field(grid, ramp_times(11, 0.1), [](double, double) { return 1.0; });
  const double h = grid.spacing();

  // tau = 0.8, s = 1/2: radius 0.8 spans nine nodes, the half radius five;
  // four stamps land in (0, 0.4] and eight in (0, 0.8].
  const double num_int = 4 * 0.1 * 5 * h;
  const double den_int = 8 * 0.1 * 9 * h;
  const double expected = std::pow(num_int, 1.0 / 1.5) / den_int;
  CHECK(reverse_holder_ratio(ones, 1.0, 1.5, 0.8, 0.0) ==
        doctest::Approx(expected).epsilon(1e-12));

  SUBCASE("exponent and geometry misuse throws") {
    CHECK_THROWS_AS((void)reverse_holder_ratio(ones, 0.0, 1.5, 0.8, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)reverse_holder_ratio(ones, 1.6, 1.5, 0.8, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)reverse_holder_ratio(ones, 1.0, 2.0, 0.8, 0.0),
                    std::invalid_argument);  // q must stay below 1 + 2s/d = 2
    CHECK_THROWS_AS((void)reverse_holder_ratio(ones, 1.0, 1.0, 0.8, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)reverse_holder_ratio(ones, 1.0, 1.5, 0.0, 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)reverse_holder_ratio(ones, 1.0, 1.5, 100.0, 0.0),
                    std::invalid_argument);  // parabolic ball outside the box
    CHECK_THROWS_AS((void)reverse_holder_ratio(ones, 1.0, 1.5, 0.8, 3.9),
                    std::invalid_argument);
  }

  SUBCASE("a vanishing field has no quotient") {
    const auto zeros =
        synthetic_field(grid, ramp_times(11, 0.1), [](double, double) { return 0.0; });
    CHECK_THROWS_AS((void)reverse_holder_ratio(zeros, 1.0, 1.5, 0.8, 0.0),
                    std::invalid_argument);
  }
}

TEST_CASE("kernel-difference energy vanishes on constants and is scale-covariant") {
  const Grid grid(4.0, 41, ExteriorPolicy::zero_exterior);
  const auto times = ramp_times(11, 0.1);
  const auto ones = synthetic_field(grid, times, [](double, double) { return 1.0; });
  const double h = grid.spacing();

  const EnergyReport flat = energy_triple_integral(ones, 0.4, 0.0, 0.5, 1.5);
  CHECK(flat.lhs == 0.0);
  CHECK(flat.ratio == 0.0);
  // Eight stamps in (0, 0.8], eleven nodes with |x| <= 1.
  const double expected_rhs = std::pow(0.4, 1.0 - 1.0 / 1.5) * std::pow(8 * 0.1 * 11 * h, 1.0 / 1.5);
  CHECK(flat.rhs_base == doctest::Approx(expected_rhs).epsilon(1e-12));

  SUBCASE("the quotient is invariant under u -> 3u") {
    const auto bump = [](double t, double x) { return 1.0 + t + std::cos(x); };
    const auto u = synthetic_field(grid, times, bump);
    const auto u3 = synthetic_field(
        grid, times, [&](double t, double x) { return 3.0 * bump(t, x); });
    const EnergyReport a = energy_triple_integral(u, 0.4, 0.0, 0.5, 1.5);
    const EnergyReport b = energy_triple_integral(u3, 0.4, 0.0, 0.5, 1.5);
    CHECK(a.lhs > 0.0);
    CHECK(b.lhs == doctest::Approx(3.0 * a.lhs).epsilon(1e-12));
    CHECK(b.ratio == doctest::Approx(a.ratio).epsilon(1e-12));
  }

  SUBCASE("exponent and geometry misuse throws") {
    CHECK_THROWS_AS((void)energy_triple_integral(ones, 0.4, 0.0, 0.5, 1.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)energy_triple_integral(ones, 0.4, 0.0, 0.5, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)energy_triple_integral(ones, 0.0, 0.0, 0.5, 1.5),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)energy_triple_integral(ones, 0.4, 0.0, 0.0, 1.5),
                    std::invalid_argument);
    CHECK_THROWS_AS((void)energy_triple_integral(ones, 0.4, 3.8, 0.5, 1.5),
                    std::invalid_argument);  // doubled ball pokes outside
    const auto zeros =
        synthetic_field(grid, times, [](double, double) { return 0.0; });
    CHECK_THROWS_AS((void)energy_triple_integral(zeros, 0.4, 0.0, 0.5, 1.5),
                    std::invalid_argument);
  }
}

TEST_CASE("dual test-function envelope ratios") {
  const Grid grid(10.0, 101, ExteriorPolicy::zero_exterior);
  std::vector<double> terminal(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    terminal[i] = std::pow(1.0 + std::abs(grid.node(i)), -2.0);
  }
  const SolutionField psi = solve_dual(oracle_spec(), grid, terminal, 0.2, 0.005);

  const PsiBoundReport report = psi_bound_ratio(psi);
  // Stamps 0, 0.005, ..., 0.15 survive the 10-step terminal collar.
  CHECK(report.frames_used == 31);
  CHECK(report.min_ratio > 0.0);
  CHECK(report.max_ratio >= report.min_ratio);
  CHECK(report.min_ratio > 0.05);
  CHECK(report.max_ratio < 20.0);

  SUBCASE("forward fields are rejected") {
    const auto forward =
        synthetic_field(grid, {0.0, 0.1}, [](double, double) { return 1.0; });
    CHECK_THROWS_AS((void)psi_bound_ratio(forward), std::invalid_argument);
  }

  SUBCASE("a dual run from any other terminal datum is rejected") {
    std::vector<double> wrong(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      wrong[i] = std::pow(1.0 + std::abs(grid.node(i)), -3.0);
    }
    const SolutionField other = solve_dual(oracle_spec(), grid, wrong, 0.2, 0.005);
    CHECK_THROWS_AS((void)psi_bound_ratio(other), std::invalid_argument);
  }
}

TEST_CASE("dual pairing is the plain weighted dot product of matching frames") {
  const Grid grid(2.0, 21, ExteriorPolicy::zero_exterior);
  const auto u = synthetic_field(grid, {0.0, 0.5}, [](double, double) { return 2.0; });
  const auto psi = synthetic_field(grid, {0.0, 0.5}, [](double, double) { return 3.0; });
  // sum h * 2 * 3 over 21 cells of total width 4.
  CHECK(dual_pairing(u, psi, 0.5) == doctest::Approx(24.0).epsilon(1e-12));

  const Grid narrower(1.0, 21, ExteriorPolicy::zero_exterior);
  const auto other = synthetic_field(narrower, {0.0, 0.5}, [](double, double) { return 1.0; });
  CHECK_THROWS_AS((void)dual_pairing(u, other, 0.5), std::invalid_argument);
  CHECK_THROWS_AS((void)dual_pairing(u, psi, 0.123), std::invalid_argument);
}

TEST_CASE("verdict sweep on a constant field has unit constants") {
  const Grid grid(4.0, 41, ExteriorPolicy::zero_exterior);
  const auto field =
      synthetic_field(grid, ramp_times(5, 1.0), [](double, double) { return 0.7; });

  VerdictSweep sweep;
  sweep.taus = {2.0, 4.0};
  sweep.x0s = {0.0};
  sweep.ceiling = 2.0;

  const HarnackReport report = verdict_theorem(field, TheoremId::thm_0_harnack, sweep);
  CHECK(report.theorem == "THM_0_HARNACK");
  REQUIRE(report.instances.size() == 2);
  for (const auto& inst : report.instances) {
    CHECK(inst.lhs == doctest::Approx(0.7));
    CHECK(inst.rhs == doctest::Approx(0.7));
    CHECK(inst.c == doctest::Approx(1.0));
  }
  CHECK(report.max_c == doctest::Approx(1.0));
  CHECK(report.tau_stability == doctest::Approx(1.0));
  CHECK(report.pass);

  SUBCASE("the ceiling gates the verdict") {
    VerdictSweep tight = sweep;
    tight.ceiling = 0.5;
    CHECK_FALSE(verdict_theorem(field, TheoremId::thm_0_harnack, tight).pass);
  }

  SUBCASE("an empty sweep is rejected") {
    VerdictSweep empty = sweep;
    empty.taus.clear();
    CHECK_THROWS_AS((void)verdict_theorem(field, TheoremId::thm_0_harnack, empty),
                    std::invalid_argument);
  }

  SUBCASE("the oscillation trend never gates") {
    VerdictSweep impossible = sweep;
    impossible.ceiling = 1e-9;
    const HarnackReport trend = verdict_theorem(field, TheoremId::liouville, impossible);
    CHECK(trend.pass);
    CHECK(trend.extras.at("osc_quotient_early") == doctest::Approx(1.0));
    CHECK(trend.extras.at("osc_quotient_late") == doctest::Approx(1.0));
    CHECK(trend.extras.at("flattening") == 1.0);
  }

  SUBCASE("the expansion-of-positivity id needs its own entry point") {
    CHECK_THROWS_AS((void)verdict_theorem(field, TheoremId::prop_exp_pos, sweep),
                    std::invalid_argument);
  }
}

TEST_CASE("expansion-of-positivity fit recovers an exact power law") {
  const Grid grid(4.0, 41, ExteriorPolicy::zero_exterior);
  const auto times = ramp_times(5, 1.0);
  // inf over the target cylinder is just the constant: m(alpha) = 0.4 alpha^2.
  const std::vector<SolutionField> fields = {
      synthetic_field(grid, times, [](double, double) { return 0.4; }),
      synthetic_field(grid, times, [](double, double) { return 0.1; }),
  };
  const std::vector<double> alphas = {1.0, 0.5};

  const HarnackReport report =
      verdict_expansion_of_positivity(fields, alphas, 1.0, 2.0, 0.0, 2.0);
  CHECK(report.theorem == "PROP_EXP_POS");
  REQUIRE(report.instances.size() == 2);
  CHECK(report.extras.at("p") == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(report.extras.at("eta") == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(report.max_c == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(report.pass);

  SUBCASE("alphas must start at one and shrink") {
    const std::vector<double> flipped = {0.5, 1.0};
    CHECK_THROWS_AS(
        (void)verdict_expansion_of_positivity(fields, flipped, 1.0, 2.0, 0.0, 2.0),
        std::invalid_argument);
    const std::vector<double> one = {1.0};
    CHECK_THROWS_AS((void)verdict_expansion_of_positivity(
                        std::span(fields.data(), 1), one, 1.0, 2.0, 0.0, 2.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        (void)verdict_expansion_of_positivity(fields, alphas, -1.0, 2.0, 0.0, 2.0),
        std::invalid_argument);
  }
}

TEST_CASE("theorem identifiers round trip through their names") {
  const TheoremId all[] = {
      TheoremId::thm_0_sup,    TheoremId::thm_0_inf,    TheoremId::thm_0_harnack,
      TheoremId::thm_elliptic, TheoremId::thm_general,  TheoremId::thm_iwh,
      TheoremId::bnd_local,    TheoremId::whi_global,   TheoremId::prop_l1,
      TheoremId::prop_exp_pos, TheoremId::lem_l1_prop,  TheoremId::liouville,
  };
  for (const TheoremId id : all) {
    CHECK(theorem_from_name(theorem_name(id)) == id);
  }
  CHECK(theorem_name(TheoremId::thm_0_sup) == "THM_0_SUP");
  CHECK_THROWS_AS((void)theorem_from_name("THM_BOGUS"), std::invalid_argument);
}

TEST_CASE("verdict reports serialize deterministically") {
  HarnackReport report;
  report.theorem = "THM_0_SUP";
  report.instances = {{0.25, 0.0, 2.0, 1.0, 2.0}, {0.5, 0.0, 3.0, 2.0, 1.5}};
  report.max_c = 2.0;
  report.tau_stability = 4.0 / 3.0;
  report.pass = true;
  report.extras["eta"] = 0.5;

  const std::string text = report.to_json();
  CHECK(text == report.to_json());

  const auto doc = nlohmann::json::parse(text);
  CHECK(doc.at("theorem") == "THM_0_SUP");
  REQUIRE(doc.at("instances").size() == 2);
  CHECK(doc.at("instances")[1].at("c") == doctest::Approx(1.5));
  CHECK(doc.at("max_c") == doctest::Approx(2.0));
  CHECK(doc.at("pass") == true);
  CHECK(doc.at("extras").at("eta") == doctest::Approx(0.5));

  std::ostringstream csv;
  report.write_csv(csv);
  std::istringstream lines(csv.str());
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "theorem,tau,x0,lhs,rhs,c");
  REQUIRE(std::getline(lines, line));
  CHECK(line == "THM_0_SUP,0.25,0,2,1,2");
  REQUIRE(std::getline(lines, line));
  CHECK(line == "THM_0_SUP,0.5,0,3,2,1.5");
  CHECK_FALSE(std::getline(lines, line));

  SUBCASE("reports without extras omit the key") {
    report.extras.clear();
    const auto bare = nlohmann::json::parse(report.to_json());
    CHECK_FALSE(bare.contains("extras"));
  }
}
