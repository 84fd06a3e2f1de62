#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "harnack/experiments.hpp"
#include "harnack/oracles.hpp"

namespace {

int run_config(const std::string& path, const std::string& output_override) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot open config file '" << path << "'\n";
    return 2;
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();

  harnack::ExperimentConfig cfg;
  try {
    cfg = harnack::validate_config(buffer.str());
  } catch (const harnack::ConfigError& e) {
    std::cerr << "invalid config '" << path << "':\n";
    for (const auto& issue : e.issues()) {
      std::cerr << "  " << issue.path << ": " << issue.message << "\n";
    }
    return 2;
  }
  if (!output_override.empty()) cfg.output_dir = output_override;

  const harnack::ExperimentResult result = harnack::run_experiment(cfg);
  std::cout << harnack::experiment_name(cfg.experiment) << "\n";
  for (const auto& line : result.summary) std::cout << "  " << line << "\n";
  std::cout << (result.pass ? "PASS" : "FAIL") << "\n";
  return harnack::write_artifacts(cfg, result);
}

int verify_lemmas(std::uint64_t seed) {
  harnack::ExperimentConfig cfg = harnack::default_config(harnack::ExperimentId::lemmas);
  cfg.seed = seed;
  const harnack::ExperimentResult result = harnack::run_experiment(cfg);
  for (const auto& line : result.summary) std::cout << line << "\n";
  std::cout << (result.pass ? "PASS" : "FAIL") << "\n";
  return result.pass ? 0 : 1;
}

int oracle_dump(const std::string& kind, double t, double range, std::size_t points) {
  if (!(t > 0.0) || !(range > 0.0) || points < 2) {
    std::cerr << "error: oracle-dump needs t > 0, range > 0 and at least 2 points\n";
    return 2;
  }
  std::printf("x,value\n");
  for (std::size_t i = 0; i < points; ++i) {
    const double x =
        -range + 2.0 * range * static_cast<double>(i) / static_cast<double>(points - 1);
    double value = 0.0;
    if (kind == "poisson_half") {
      value = harnack::poisson_kernel(t, x);
    } else if (kind == "gaussian") {
      value = harnack::gaussian_kernel(t, x);
    } else {
      value = harnack::hk_envelope(t, x, 0.5);
    }
    std::printf("%.12g,%.12g\n", x, value);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "harnack-lab: verdicts and structural checks for nonlocal parabolic "
      "equations with kernels comparable to the fractional Laplacian"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_override;
  CLI::App* run = app.add_subcommand("run", "execute one experiment from a JSON config");
  run->add_option("config", config_path, "path to the experiment config")->required();
  run->add_option("--output-dir", output_override, "override the config's output directory");

  std::uint64_t seed = harnack::default_config(harnack::ExperimentId::lemmas).seed;
  CLI::App* lemmas =
      app.add_subcommand("verify-lemmas", "run the randomized algebraic estimate checks");
  lemmas->add_option("--seed", seed, "sampling seed");

  std::string kind = "poisson_half";
  double t = 1.0;
  double range = 10.0;
  std::size_t points = 201;
  CLI::App* dump =
      app.add_subcommand("oracle-dump", "print a closed-form reference profile as CSV");
  dump->add_option("--kind", kind, "poisson_half | gaussian | envelope")
      ->check(CLI::IsMember({"poisson_half", "gaussian", "envelope"}));
  dump->add_option("--t", t, "evaluation time, > 0");
  dump->add_option("--range", range, "half width of the x window");
  dump->add_option("--points", points, "number of sample points");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_config(config_path, output_override);
    if (lemmas->parsed()) return verify_lemmas(seed);
    return oracle_dump(kind, t, range, points);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
