#include <algorithm>
#include <string>
#include <vector>

#include "doctest.h"
#include "harnack/experiments.hpp"
#include "json.hpp"

using namespace harnack;

namespace {

/// Asserts that validate_config rejects `raw` with at least one issue whose
/// path and message contain the given fragments.
void expect_issue(const std::string& raw, const std::string& path_part,
                  const std::string& message_part) {
  try {
    (void)validate_config(raw);
    FAIL("config accepted: ", raw);
  } catch (const ConfigError& e) {
    const bool found = std::any_of(
        e.issues().begin(), e.issues().end(), [&](const ConfigIssue& issue) {
          return issue.path.find(path_part) != std::string::npos &&
                 issue.message.find(message_part) != std::string::npos;
        });
    if (!found) {
      FAIL("no issue matching '", path_part, "' / '", message_part,
           "' in: ", std::string(e.what()));
    }
    CHECK(std::string(e.what()).rfind("invalid config", 0) == 0);
  }
}

}  // namespace

TEST_CASE("experiment identifiers round trip through their names") {
  const ExperimentId all[] = {
      ExperimentId::e1_time_insensitive,      ExperimentId::e2_elliptic,
      ExperimentId::e3_weighted_l1,           ExperimentId::e4_psi_pairing,
      ExperimentId::e5_counterexample,        ExperimentId::e6_gaussian_contrast,
      ExperimentId::e7_improved_weak_harnack, ExperimentId::e8_fundamental_solution,
      ExperimentId::e9_energy_decay,          ExperimentId::e10_reverse_holder,
      ExperimentId::lemmas,
  };
  for (const ExperimentId id : all) {
    CHECK(experiment_from_name(experiment_name(id)) == id);
  }
  CHECK(experiment_name(ExperimentId::e3_weighted_l1) == "E3_weighted_L1");
  CHECK_THROWS_AS((void)experiment_from_name("E99_bogus"), std::invalid_argument);
}

TEST_CASE("a bare experiment name yields the documented defaults") {
  const ExperimentConfig cfg = validate_config(R"({"experiment": "E3_weighted_L1"})");
  CHECK(cfg.experiment == ExperimentId::e3_weighted_l1);
  CHECK(cfg.kernel.family == KernelFamily::frac_laplacian);
  CHECK(cfg.cells >= 17);
  CHECK(cfg.store_every == 10);
  CHECK(cfg.sweeps.taus == std::vector<double>{0.1, 1.0});
  CHECK(cfg.ceilings.count("prop_l1") == 1);
  CHECK(cfg.ceilings.count("oracle_ratio") == 1);
  CHECK_FALSE(cfg.kernel_b.has_value());
  CHECK_FALSE(cfg.output_dir.empty());
}

TEST_CASE("explicit fields override the defaults") {
  const ExperimentConfig cfg = validate_config(R"({
    "experiment": "E3_weighted_L1",
    "kernel": {"family": "checkerboard", "lambda": 1.0, "Lambda": 2.0,
               "params": {"cell_x": 1.0, "cell_t": 0.25}},
    "grid": {"half_width": 20.0, "cells": 401},
    "T": 2.0, "dt": 0.002, "store_every": 5,
    "sweeps": {"taus": [0.5, 1.5], "x0s": [-1.0, 0.0]},
    "ceilings": {"prop_l1": 2.5},
    "seed": 7, "output_dir": "out/custom", "notes": "override check"
  })");
  CHECK(cfg.kernel.family == KernelFamily::checkerboard);
  CHECK(cfg.kernel.lambda == 1.0);
  CHECK(cfg.kernel.Lambda == 2.0);
  CHECK(cfg.kernel.family_params.at("cell_t") == 0.25);
  CHECK(cfg.half_width == 20.0);
  CHECK(cfg.cells == 401);
  CHECK(cfg.T == 2.0);
  CHECK(cfg.dt == 0.002);
  CHECK(cfg.store_every == 5);
  CHECK(cfg.sweeps.taus == std::vector<double>{0.5, 1.5});
  CHECK(cfg.sweeps.x0s == std::vector<double>{-1.0, 0.0});
  CHECK(cfg.ceilings.at("prop_l1") == 2.5);
  CHECK(cfg.ceilings.at("oracle_ratio") == 1.05);  // untouched default
  CHECK(cfg.seed == 7);
  CHECK(cfg.output_dir == "out/custom");
  CHECK(cfg.notes == "override check");
}

TEST_CASE("config validation rejects malformed documents") {
  expect_issue("{", "$", "not valid JSON");
  expect_issue("[1, 2]", "$", "must be a JSON object");
  expect_issue("{}", "experiment", "required string");
  expect_issue(R"({"experiment": "E99_bogus"})", "experiment", "");
  expect_issue(R"({"experiment": "E3_weighted_L1", "lamda": 1.0})", "lamda", "unknown key");
  expect_issue(R"({"experiment": "E3_weighted_L1", "kernel": {"s": 1.5}})", "kernel.s",
               "s must lie in (0,1)");
  expect_issue(R"({"experiment": "E3_weighted_L1", "kernel": {"lambda": 5.0}})", "kernel",
               "Lambda must be >= lambda");
  expect_issue(R"({"experiment": "E3_weighted_L1",
                   "kernel": {"lambda": 0.5, "Lambda": 1.0}})",
               "kernel", "amplitude 'a' must lie in [lambda, Lambda]");
  expect_issue(R"({"experiment": "E3_weighted_L1", "grid": {"cells": 100}})", "grid.cells",
               "must be odd and at least 17");
  expect_issue(R"({"experiment": "E3_weighted_L1", "grid": {"half_width": -1.0}})",
               "grid.half_width", "must be positive");
  expect_issue(R"({"experiment": "E3_weighted_L1", "ceilings": {"bogus_gate": 1.0}})",
               "ceilings.bogus_gate", "unknown ceiling");
  expect_issue(R"({"experiment": "E3_weighted_L1", "ceilings": {"prop_l1": -1.0}})",
               "ceilings.prop_l1", "must be positive");
  expect_issue(R"({"experiment": "E3_weighted_L1", "store_every": 0})", "store_every",
               "must be a positive integer");
  expect_issue(R"({"experiment": "E3_weighted_L1", "seed": -1})", "seed",
               "must be a nonnegative integer");
  expect_issue(R"({"experiment": "E3_weighted_L1", "output_dir": ""})", "output_dir",
               "must be a nonempty string");
  expect_issue(R"({"experiment": "E3_weighted_L1", "sweeps": {"taus": []}})", "sweeps.taus",
               "must be a nonempty array");
  expect_issue(R"({"experiment": "E3_weighted_L1", "sweeps": {"taus": [-0.5]}})",
               "sweeps.taus", "entries must be positive");
}

TEST_CASE("config validation enforces the cross-field rules") {
  expect_issue(R"({"experiment": "E3_weighted_L1", "T": 0.5, "dt": 1.0})", "dt",
               "must not exceed T");
  expect_issue(R"({"experiment": "E3_weighted_L1", "T": 1.0, "dt": 0.3})", "dt",
               "must divide T - t_start into whole steps");
  expect_issue(R"({"experiment": "E3_weighted_L1", "sweeps": {"taus": [1.0, 0.5]}})",
               "sweeps.taus", "must be strictly ascending");
  expect_issue(R"({"experiment": "E3_weighted_L1", "t_start": -1.0})", "t_start",
               "only used by E5_counterexample");
  expect_issue(R"({"experiment": "E5_counterexample", "t_start": 0.0})", "t_start",
               "must be negative");
  expect_issue(R"({"experiment": "E3_weighted_L1", "hygiene": true})", "hygiene",
               "only used by E1_time_insensitive");
  expect_issue(R"({"experiment": "E3_weighted_L1", "kernel_b": {"s": 0.5}})", "kernel_b",
               "only used by E1_time_insensitive");
  expect_issue(R"({"experiment": "E8_fundamental_solution", "oracle_injection": true})",
               "oracle_injection", "not available for this experiment");
  expect_issue(R"({"experiment": "E1_time_insensitive", "oracle_injection": true})",
               "hygiene", "requires solver runs");
  expect_issue(R"({"experiment": "E9_energy_decay", "grid": {"cells": 19}})", "grid.cells",
               "must be 1 mod 4");
  expect_issue(R"({"experiment": "E7_improved_weak_harnack", "sweeps": {"taus": [1.5]}})",
               "sweeps.taus", "needs 8 R^{2s} <= T");
}

TEST_CASE("validation collects every issue in one pass") {
  try {
    (void)validate_config(
        R"({"experiment": "E3_weighted_L1", "lamda": 1.0, "grid": {"cells": 100}})");
    FAIL("config accepted");
  } catch (const ConfigError& e) {
    CHECK(e.issues().size() == 2);
  }
}

TEST_CASE("every default config is canonical under echo and re-validation") {
  const ExperimentId all[] = {
      ExperimentId::e1_time_insensitive,      ExperimentId::e2_elliptic,
      ExperimentId::e3_weighted_l1,           ExperimentId::e4_psi_pairing,
      ExperimentId::e5_counterexample,        ExperimentId::e6_gaussian_contrast,
      ExperimentId::e7_improved_weak_harnack, ExperimentId::e8_fundamental_solution,
      ExperimentId::e9_energy_decay,          ExperimentId::e10_reverse_holder,
      ExperimentId::lemmas,
  };
  for (const ExperimentId id : all) {
    CAPTURE(experiment_name(id));
    const std::string first = config_to_json(default_config(id));
    const std::string second = config_to_json(validate_config(first));
    CHECK(first == second);
  }
}

TEST_CASE("a full experiment run is byte-identical when repeated") {
  ExperimentConfig cfg = default_config(ExperimentId::e6_gaussian_contrast);
  cfg.cells = 401;
  cfg.dt = 2e-3;
  cfg.store_every = 10;

  const ExperimentResult first = run_experiment(cfg);
  const ExperimentResult second = run_experiment(cfg);
  CHECK(first.report_json == second.report_json);
  CHECK(first.csv_files == second.csv_files);
  CHECK(first.pass == second.pass);

  const auto doc = nlohmann::json::parse(first.report_json);
  CHECK(doc.at("experiment") == "E6_gaussian_contrast");
  CHECK(doc.at("config").at("grid").at("cells") == 401);
  REQUIRE(doc.contains("checks"));
  CHECK(!doc.at("checks").empty());
  for (const auto& row : doc.at("checks")) {
    CHECK(row.contains("name"));
    CHECK(row.contains("value"));
    CHECK(row.contains("gate"));
    CHECK(row.contains("pass"));
  }
  CHECK(!first.csv_files.empty());
  CHECK(!first.summary.empty());
  for (const std::string& line : first.summary) {
    const bool tagged = line.rfind("[PASS] ", 0) == 0 || line.rfind("[FAIL] ", 0) == 0;
    CHECK(tagged);
  }
}
