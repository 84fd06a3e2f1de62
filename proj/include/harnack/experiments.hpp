#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "harnack/kernels.hpp"

/// Configuration-driven scenario runner: parses and validates experiment
/// configs, executes the numbered experiments E1-E10 plus the randomized
/// lemma suite, and renders deterministic reports (report.json + CSV files;
/// wall-clock metadata is segregated into meta.json so reruns with the same
/// config and seed are byte-identical).
namespace harnack {

enum class ExperimentId {
  e1_time_insensitive,      ///< sup/inf/Harnack verdicts + solver-vs-oracle accuracy
  e2_elliptic,              ///< single-slice (elliptic form) verdicts + flattening trend
  e3_weighted_l1,           ///< weighted-L1 norm comparability across stamps
  e4_psi_pairing,           ///< dual test-function bounds and pairing conservation
  e5_counterexample,        ///< exterior-driven waiting-time demonstration
  e6_gaussian_contrast,     ///< local Gaussian vs nonlocal Poisson quotients
  e7_improved_weak_harnack, ///< ball-mean-to-inf verdicts, positivity expansion
  e8_fundamental_solution,  ///< transition-density tables and structural checks
  e9_energy_decay,          ///< nonlocal energy against cylinder q-means
  e10_reverse_holder,       ///< half-to-full cylinder power-mean quotients
  lemmas,                   ///< randomized algebraic/integral estimate checkers
};

std::string experiment_name(ExperimentId id);
ExperimentId experiment_from_name(const std::string& name);

struct ConfigIssue {
  std::string path;     ///< JSON pointer-ish location, e.g. "kernel.s"
  std::string message;
};

/// Thrown by validate_config; collects every issue found in one pass.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues);
  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string summarize(const std::vector<ConfigIssue>& issues);
  std::vector<ConfigIssue> issues_;
};

/// Sweep parameters; the interpretation of `taus` follows the theorem the
/// experiment evaluates (cylinder scales, ball radii for E7, slice times for
/// E5, the stamp window [front, back] for E3).
struct SweepSpec {
  std::vector<double> taus;
  std::vector<double> x0s;
};

/// One experiment, fully specified. default_config(id) documents the
/// per-experiment defaults; validate_config starts from those and overrides
/// with whatever the JSON document sets, rejecting unknown keys.
struct ExperimentConfig {
  ExperimentId experiment = ExperimentId::e1_time_insensitive;
  KernelSpec kernel;                   ///< primary kernel of the experiment
  std::optional<KernelSpec> kernel_b;  ///< E1 only: rough-coefficient companion
  double half_width = 40.0;
  std::size_t cells = 1601;
  double T = 1.0;
  double dt = 1e-3;
  std::size_t store_every = 1;
  double t_start = 0.0;                ///< E5 marches from a negative start time
  SweepSpec sweeps;
  std::map<std::string, double> ceilings;  ///< named gate values, all > 0
  bool oracle_injection = false;  ///< replace solver fields by analytic ones
  bool hygiene = false;           ///< E1 only: dt/h-halving + rerun identity block
  std::uint64_t seed = 20240915;
  std::string output_dir;
  std::string notes;
};

/// The documented defaults for one experiment id (grid scale, horizon,
/// sweeps, and the full ceiling set the runner consults).
ExperimentConfig default_config(ExperimentId id);

/// Parses and validates a JSON config document. Unknown keys anywhere are
/// hard errors; all structural and range problems are collected and thrown
/// together as a ConfigError. Fields not present keep the per-experiment
/// defaults.
ExperimentConfig validate_config(const std::string& raw_json);

/// Canonical JSON rendering of a config (the form echoed into report.json).
std::string config_to_json(const ExperimentConfig& config);

/// One scalar check: `value` compared against the human-readable `gate`
/// (e.g. "<= 0.05"); gates of the form "reported" are informational and
/// always pass.
struct CheckResult {
  std::string name;
  double value = 0.0;
  std::string gate;
  bool pass = false;
};

struct ExperimentResult {
  bool pass = false;         ///< conjunction of all check and report passes
  std::string report_json;   ///< deterministic report document
  /// (relative file name, contents) pairs written under output_dir/frames/.
  std::vector<std::pair<std::string, std::string>> csv_files;
  std::vector<std::string> summary;  ///< one printable line per check/report
};

/// Executes the experiment. Deterministic given (config, seed); throws
/// std::invalid_argument / std::runtime_error on numeric misuse, never on a
/// failed gate (failures are reported with pass = false).
ExperimentResult run_experiment(const ExperimentConfig& config);

/// Writes report.json, frames/*.csv and meta.json under config.output_dir
/// (created if needed). Returns the process exit status: 0 iff result.pass.
int write_artifacts(const ExperimentConfig& config, const ExperimentResult& result);

}  // namespace harnack
