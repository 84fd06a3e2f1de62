// Acceptance gate for the laboratory: runs every experiment on its default
// configuration and prints one pass/fail line per criterion. All tolerances
// are pinned here as named constants; the binary exits nonzero if any
// criterion fails. Progress goes to stderr so stdout stays one line per
// criterion.

#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "harnack/experiments.hpp"
#include "json.hpp"

namespace {

using harnack::ExperimentConfig;
using harnack::ExperimentId;
using json = nlohmann::json;

// -- pinned tolerances ------------------------------------------------------
constexpr double kOracleSupRelTol = 0.05;       // 1: solver vs Poisson kernel
constexpr double kSpotValue = 4.0;              // 2: exact sup/tail quotient
constexpr double kSpotRelTol = 0.02;            // 2: spot window
constexpr double kTauStabilityLimit = 3.0;      // 2: max/min of c over taus
constexpr double kCauchyWindowRatioMax = 1.5;   // 3: solver-field L1(mu) ratio
constexpr double kOracleWindowRatioMax = 1.05;  // 3: quadrature-field ratio
constexpr double kPsiLo = 0.2;                  // 4: dual envelope window
constexpr double kPsiHi = 5.0;                  // 4
constexpr double kPairingDriftMax = 0.01;       // 4: relative pairing drift
constexpr double kQuotientGrowthMin = 10.0;     // 5: waiting-time growth
constexpr double kGaussianQuotientMin = 100.0;  // 6: local field blows the gate
constexpr double kPoissonQuotientMax = 10.0;    // 6: nonlocal field stays flat
constexpr double kCkRelMax = 0.02;              // 7: Chapman-Kolmogorov
constexpr double kCkOscRelMax = 0.03;           // 7: time-oscillating variant
constexpr double kDualityRelMax = 0.03;         // 7: forward/adjoint symmetry
constexpr double kEnvelopeCMax = 4.0;           // 7: two-sided envelope factor
constexpr double kTailIntegralAbsTol = 1e-5;    // 8: closed-form spot value
constexpr double kWeightedTailLo = 0.1;         // 8: bounded weighted ratio
constexpr double kWeightedTailHi = 10.0;        // 8
constexpr double kHStabilityMax = 0.15;         // 9: grid-halving drift
constexpr double kRefinementRelMax = 0.20;      // 10: (eta, p) refinement
constexpr double kDtHalvingMax = 0.05;          // 11: time-step halving drift
constexpr double kHHalvingMax = 0.10;           // 11: grid-halving drift

struct RunCache {
  std::map<ExperimentId, json> reports;
  std::map<ExperimentId, bool> passes;

  const json& report(ExperimentId id) {
    auto it = reports.find(id);
    if (it != reports.end()) return it->second;
    const ExperimentConfig cfg = harnack::default_config(id);
    std::fprintf(stderr, "[acceptance] running %s ...\n",
                 harnack::experiment_name(id).c_str());
    const harnack::ExperimentResult result = harnack::run_experiment(cfg);
    passes[id] = result.pass;
    it = reports.emplace(id, json::parse(result.report_json)).first;
    return it->second;
  }

  bool experiment_pass(ExperimentId id) {
    report(id);
    return passes.at(id);
  }
};

double check_value(const json& report, const std::string& name) {
  for (const auto& row : report.at("checks")) {
    if (row.at("name").get<std::string>() == name) return row.at("value").get<double>();
  }
  throw std::runtime_error("missing check row: " + name);
}

bool check_pass(const json& report, const std::string& name) {
  for (const auto& row : report.at("checks")) {
    if (row.at("name").get<std::string>() == name) return row.at("pass").get<bool>();
  }
  throw std::runtime_error("missing check row: " + name);
}

const json& verdict(const json& report, const std::string& key) {
  return report.at("reports").at(key);
}

/// A verdict report is acceptable when every empirical constant is finite,
/// the sweep is tau-stable, and the experiment's own ceiling held.
bool verdict_ok(const json& report, const std::string& key, double stability_limit) {
  const json& v = verdict(report, key);
  const double max_c = v.at("max_c").get<double>();
  const double stab = v.at("tau_stability").get<double>();
  return std::isfinite(max_c) && max_c > 0.0 && stab <= stability_limit &&
         v.at("pass").get<bool>();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

struct Gate {
  bool pass = true;
  std::string evidence;

  void require(bool ok, const std::string& note) {
    pass = pass && ok;
    if (!evidence.empty()) evidence += ", ";
    evidence += note;
  }
};

}  // namespace

int main() {
  RunCache cache;
  std::vector<std::pair<std::string, Gate>> lines;

  try {
    const json& e1 = cache.report(ExperimentId::e1_time_insensitive);

    {  // 1. Solver accuracy against the closed-form transition density.
      Gate g;
      const double rel = check_value(e1, "solver_sup_rel_error");
      g.require(rel <= kOracleSupRelTol,
                "sup-rel error " + fmt(rel) + " <= " + fmt(kOracleSupRelTol));
      lines.push_back({"criterion  1: solver matches exact transition density", g});
    }

    {  // 2. Two-sided estimates: finite, tau-stable constants + exact spot value.
      Gate g;
      for (const std::string key :
           {"ORACLE_THM_0_SUP", "ORACLE_THM_0_INF", "ORACLE_THM_0_HARNACK", "SOLVER_THM_0_SUP",
            "SOLVER_THM_0_INF", "SOLVER_THM_0_HARNACK", "ROUGH_THM_GENERAL"}) {
      g.require(verdict_ok(e1, key, kTauStabilityLimit),
                  key + " c=" + fmt(verdict(e1, key).at("max_c").get<double>()));
      }
      const double spot = check_value(e1, "oracle_spot_sup_c");
      g.require(std::abs(spot / kSpotValue - 1.0) <= kSpotRelTol,
                "spot " + fmt(spot) + " within " + fmt(100 * kSpotRelTol) + "% of 4");
      lines.push_back({"criterion  2: sup/inf/Harnack constants", g});
    }

    {  // 3. Weighted-L1 comparability across the stamp window.
      const json& e3 = cache.report(ExperimentId::e3_weighted_l1);
      Gate g;
      const double oracle_ratio = check_value(e3, "oracle_quadrature_ratio");
      const double solver_ratio = verdict(e3, "PROP_L1").at("max_c").get<double>();
      g.require(oracle_ratio <= kOracleWindowRatioMax,
                "quadrature ratio " + fmt(oracle_ratio) + " <= " + fmt(kOracleWindowRatioMax));
      g.require(solver_ratio <= kCauchyWindowRatioMax && verdict(e3, "PROP_L1").at("pass").get<bool>(),
                "solver ratio " + fmt(solver_ratio) + " <= " + fmt(kCauchyWindowRatioMax));
      lines.push_back({"criterion  3: weighted-L1 norm comparability", g});
    }

    {  // 4. Dual test function: envelope window + pairing conservation.
      const json& e4 = cache.report(ExperimentId::e4_psi_pairing);
      Gate g;
      const double lo = check_value(e4, "psi_min_ratio");
      const double hi = check_value(e4, "psi_max_ratio");
      const double drift = check_value(e4, "pairing_drift");
      g.require(lo >= kPsiLo && hi <= kPsiHi,
                "envelope ratios in [" + fmt(lo) + ", " + fmt(hi) + "] within [" + fmt(kPsiLo) +
                    ", " + fmt(kPsiHi) + "]");
      g.require(drift <= kPairingDriftMax,
                "pairing drift " + fmt(drift) + " <= " + fmt(kPairingDriftMax));
      lines.push_back({"criterion  4: dual envelope and pairing", g});
    }

    {  // 5. Exterior-driven waiting time: exact zero, then positivity + growth.
      const json& e5 = cache.report(ExperimentId::e5_counterexample);
      Gate g;
      g.require(check_value(e5, "pre_onset_max_abs") == 0.0, "pre-onset identically zero");
      g.require(check_value(e5, "post_onset_min") > 0.0, "post-onset strictly positive");
      const double growth = check_value(e5, "quotient_growth");
      g.require(growth >= kQuotientGrowthMin,
                "quotient growth " + fmt(growth) + " >= " + fmt(kQuotientGrowthMin));
      lines.push_back({"criterion  5: waiting-time counterexample", g});
    }

    {  // 6. Gaussian vs Poisson contrast at source distance 10.
      const json& e6 = cache.report(ExperimentId::e6_gaussian_contrast);
      Gate g;
      const double qg = check_value(e6, "gaussian_quotient");
      const double qp = check_value(e6, "poisson_quotient");
      g.require(qg > kGaussianQuotientMin,
                "gaussian quotient " + fmt(qg) + " > " + fmt(kGaussianQuotientMin));
      g.require(qp < kPoissonQuotientMax,
                "poisson quotient " + fmt(qp) + " < " + fmt(kPoissonQuotientMax));
      lines.push_back({"criterion  6: local/nonlocal contrast", g});
    }

    {  // 7. Transition-density table structure.
      const json& e8 = cache.report(ExperimentId::e8_fundamental_solution);
      Gate g;
      g.require(check_pass(e8, "frac_mass") && check_pass(e8, "oscillating_mass"),
                "mass nonneg, <= 1, nonincreasing");
      const double ck = check_value(e8, "frac_ck_rel");
      const double ck_osc = check_value(e8, "oscillating_ck_rel");
      g.require(ck <= kCkRelMax && ck_osc <= kCkOscRelMax,
                "Chapman-Kolmogorov " + fmt(ck) + "/" + fmt(ck_osc));
      const double dual = check_value(e8, "frac_duality_rel");
      const double dual_osc = check_value(e8, "oscillating_duality_rel");
      g.require(dual <= kDualityRelMax && dual_osc <= kDualityRelMax,
                "duality " + fmt(dual) + "/" + fmt(dual_osc));
      const double env = check_value(e8, "frac_envelope_C");
      const double env_osc = check_value(e8, "oscillating_envelope_C");
      g.require(env <= kEnvelopeCMax && env_osc <= kEnvelopeCMax,
                "envelope C " + fmt(env) + "/" + fmt(env_osc) + " <= " + fmt(kEnvelopeCMax));
      lines.push_back({"criterion  7: transition-density properties", g});
    }

    {  // 8. Randomized estimate suite + closed-form tail integral.
      const json& lem = cache.report(ExperimentId::lemmas);
      Gate g;
      bool zero_violations = true;
      for (const auto& row : lem.at("checks")) {
        const std::string name = row.at("name").get<std::string>();
        if (name.find("violations") != std::string::npos) {
          zero_violations = zero_violations && row.at("value").get<double>() == 0.0;
        }
      }
      g.require(zero_violations, "zero violations across sampled estimates");
      const double tail_err = check_value(lem, "tail_integral_x0_abs_err");
      g.require(tail_err <= kTailIntegralAbsTol,
                "tail integral error " + fmt(tail_err) + " <= " + fmt(kTailIntegralAbsTol));
      const double wlo = check_value(lem, "tail_weighted_min");
      const double whi = check_value(lem, "tail_weighted_max");
      g.require(wlo >= kWeightedTailLo && whi <= kWeightedTailHi,
                "weighted tail in [" + fmt(wlo) + ", " + fmt(whi) + "]");
      lines.push_back({"criterion  8: sampled estimates and tail integral", g});
    }

    {  // 9. Energy and reverse-Holder functionals: bounded + h-stable.
      const json& e9 = cache.report(ExperimentId::e9_energy_decay);
      const json& e10 = cache.report(ExperimentId::e10_reverse_holder);
      Gate g;
      const double energy = check_value(e9, "energy_ratio_max");
      const double rh = check_value(e10, "holder_ratio_max");
      g.require(std::isfinite(energy) && check_pass(e9, "energy_ratio_max"),
                "energy ratio " + fmt(energy) + " bounded over tau halving");
      g.require(std::isfinite(rh) && check_pass(e10, "holder_ratio_max"),
                "reverse-Holder ratio " + fmt(rh) + " bounded over tau halving");
      const double e9h = check_value(e9, "energy_h_stability_rel");
      const double e10h = check_value(e10, "holder_h_stability_rel");
      g.require(e9h <= kHStabilityMax && e10h <= kHStabilityMax,
                "h-stability " + fmt(e9h) + "/" + fmt(e10h) + " <= " + fmt(kHStabilityMax));
      lines.push_back({"criterion  9: energy and reverse-Holder bounds", g});
    }

    {  // 10. Ball-mean-to-inf Harnack across kernels + positivity expansion.
      const json& e7 = cache.report(ExperimentId::e7_improved_weak_harnack);
      Gate g;
      for (const std::string key : {"IWH_FRAC", "IWH_CHECKERBOARD", "IWH_OSCILLATING"}) {
        g.require(verdict_ok(e7, key, kTauStabilityLimit),
                  key + " c=" + fmt(verdict(e7, key).at("max_c").get<double>()));
      }
      g.require(verdict(e7, "LEM_L1_PROP").at("pass").get<bool>(), "L1 lower bound holds");
      const double eta_rel = check_value(e7, "expansion_eta_refinement_rel");
      const double p_rel = check_value(e7, "expansion_p_refinement_rel");
      g.require(eta_rel <= kRefinementRelMax && p_rel <= kRefinementRelMax,
                "(eta, p) refinement drift " + fmt(eta_rel) + "/" + fmt(p_rel));
      lines.push_back({"criterion 10: improved weak Harnack and expansion", g});
    }

    {  // 11. Numerical hygiene on the default configuration.
      Gate g;
      const double dt_rel = check_value(e1, "dt_halving_rel");
      const double h_rel = check_value(e1, "h_halving_rel");
      g.require(dt_rel < kDtHalvingMax, "dt-halving drift " + fmt(dt_rel));
      g.require(h_rel < kHHalvingMax, "h-halving drift " + fmt(h_rel));
      g.require(check_value(e1, "rerun_byte_identical") == 1.0, "rerun byte-identical");
      lines.push_back({"criterion 11: numerical hygiene", g});
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "acceptance aborted: %s\n", e.what());
    return 1;
  }

  bool all = true;
  for (const auto& [label, gate] : lines) {
    all = all && gate.pass;
    std::printf("[%s] %s — %s\n", gate.pass ? "PASS" : "FAIL", label.c_str(),
                gate.evidence.c_str());
  }
  std::printf("%s\n", all ? "ACCEPTANCE PASS" : "ACCEPTANCE FAIL");
  return all ? 0 : 1;
}
