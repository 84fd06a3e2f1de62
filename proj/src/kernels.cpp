#include "harnack/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

namespace harnack {
namespace {

using nlohmann::json;

// Floor division robust for negative coordinates (cell indices of the
// checkerboard family must tile the whole line consistently).
std::int64_t cell_index(double v, double cell) {
  return static_cast<std::int64_t>(std::floor(v / cell));
}

double checkerboard_amplitude(const KernelSpec& spec, double t, double x, double y) {
  const double lx = spec.param("cell_x", 1.0);
  const double lt = spec.param("cell_t", 0.25);
  const std::int64_t parity =
      ((cell_index(x, lx) + cell_index(y, lx) + cell_index(t, lt)) % 2 + 2) % 2;
  return parity == 0 ? spec.Lambda : spec.lambda;
}

double oscillating_amplitude(const KernelSpec& spec, double t) {
  const double omega = spec.param("omega", 2.0 * M_PI);
  return std::sin(omega * t) >= 0.0 ? spec.Lambda : spec.lambda;
}

// custom_table: amplitude looked up in a symmetric table over coarse spatial
// cells of size "cell" covering [-extent, extent); outside, the base value is
// used. Entries are provided as params "a_<i>_<j>" (i <= j, cell indices
// counted from the left edge). Lets tests build kernels that deliberately
// break the bounds or carry an isolated spike.
double table_amplitude(const KernelSpec& spec, double x, double y) {
  const double cell = spec.param("cell", 5.0);
  const double extent = spec.param("extent", 20.0);
  const double base = spec.param("base", spec.lambda);
  auto idx = [&](double v) -> std::int64_t { return cell_index(v + extent, cell); };
  const std::int64_t ncells = static_cast<std::int64_t>(std::ceil(2.0 * extent / cell));
  std::int64_t i = idx(x);
  std::int64_t j = idx(y);
  if (i < 0 || j < 0 || i >= ncells || j >= ncells) return base;
  if (i > j) std::swap(i, j);
  const std::string key = "a_" + std::to_string(i) + "_" + std::to_string(j);
  const auto it = spec.family_params.find(key);
  return it == spec.family_params.end() ? base : it->second;
}

}  // namespace

std::string family_name(KernelFamily family) {
  switch (family) {
    case KernelFamily::frac_laplacian: return "frac_laplacian";
    case KernelFamily::checkerboard: return "checkerboard";
    case KernelFamily::time_oscillating: return "time_oscillating";
    case KernelFamily::custom_table: return "custom_table";
  }
  throw std::logic_error("unreachable kernel family");
}

KernelFamily family_from_name(const std::string& name) {
  if (name == "frac_laplacian") return KernelFamily::frac_laplacian;
  if (name == "checkerboard") return KernelFamily::checkerboard;
  if (name == "time_oscillating") return KernelFamily::time_oscillating;
  if (name == "custom_table") return KernelFamily::custom_table;
  throw std::invalid_argument("unknown kernel family '" + name + "'");
}

void KernelSpec::validate() const {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("s must lie in (0,1)");
  if (dim != 1) throw std::invalid_argument("only dim = 1 is supported");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(Lambda >= lambda)) throw std::invalid_argument("Lambda must be >= lambda");
  if (family == KernelFamily::frac_laplacian) {
    const double a = param("a", 1.0);
    if (!(a >= lambda && a <= Lambda)) {
      throw std::invalid_argument("frac_laplacian amplitude 'a' must lie in [lambda, Lambda]");
    }
  }
  if (family == KernelFamily::checkerboard) {
    if (!(param("cell_x", 1.0) > 0.0) || !(param("cell_t", 0.25) > 0.0)) {
      throw std::invalid_argument("checkerboard cell sizes must be positive");
    }
  }
  if (family == KernelFamily::time_oscillating && !(param("omega", 2.0 * M_PI) > 0.0)) {
    throw std::invalid_argument("oscillation frequency must be positive");
  }
  if (family == KernelFamily::custom_table) {
    if (!(param("cell", 5.0) > 0.0) || !(param("extent", 20.0) > 0.0)) {
      throw std::invalid_argument("custom_table cell/extent must be positive");
    }
  }
}

double KernelSpec::param(const std::string& name, double fallback) const {
  const auto it = family_params.find(name);
  return it == family_params.end() ? fallback : it->second;
}

double amplitude(const KernelSpec& spec, double t, double x, double y) {
  switch (spec.family) {
    case KernelFamily::frac_laplacian: return spec.param("a", 1.0);
    case KernelFamily::checkerboard: return checkerboard_amplitude(spec, t, x, y);
    case KernelFamily::time_oscillating: return oscillating_amplitude(spec, t);
    case KernelFamily::custom_table: return table_amplitude(spec, x, y);
  }
  throw std::logic_error("unreachable kernel family");
}

double evaluate(const KernelSpec& spec, double t, double x, double y) {
  if (x == y) throw std::domain_error("kernel is singular on the diagonal x == y");
  const double d = std::abs(x - y);
  return amplitude(spec, t, x, y) * std::pow(d, -(spec.dim + 2.0 * spec.s));
}

std::int64_t time_key(const KernelSpec& spec, double t) {
  switch (spec.family) {
    case KernelFamily::frac_laplacian:
    case KernelFamily::custom_table:
      return 0;
    case KernelFamily::checkerboard:
      return cell_index(t, spec.param("cell_t", 0.25));
    case KernelFamily::time_oscillating:
      return std::sin(spec.param("omega", 2.0 * M_PI) * t) >= 0.0 ? 1 : 0;
  }
  throw std::logic_error("unreachable kernel family");
}

bool space_homogeneous(const KernelSpec& spec) {
  switch (spec.family) {
    case KernelFamily::frac_laplacian:
    case KernelFamily::time_oscillating:
      return true;
    case KernelFamily::checkerboard:
    case KernelFamily::custom_table:
      return false;
  }
  throw std::logic_error("unreachable kernel family");
}

BoundReport verify_bounds(const KernelSpec& spec, const SamplePlan& plan) {
  spec.validate();
  if (plan.count == 0) throw std::invalid_argument("sample plan must be nonempty");
  SampleRng rng(plan.seed);
  const Interval& rt = plan.range("t");
  const Interval& rx = plan.range("x");
  const Interval& ry = plan.range("y");
  BoundReport report;
  report.min_ratio = std::numeric_limits<double>::infinity();
  report.max_ratio = -std::numeric_limits<double>::infinity();
  const double power = spec.dim + 2.0 * spec.s;
  for (std::uint64_t i = 0; i < plan.count; ++i) {
    const double t = rng.uniform(rt);
    const double x = rng.uniform(rx);
    double y = rng.uniform(ry);
    if (y == x) y = std::nextafter(y, ry.hi > y ? ry.hi : ry.lo);
    const double ratio = evaluate(spec, t, x, y) * std::pow(std::abs(x - y), power);
    report.min_ratio = std::min(report.min_ratio, ratio);
    report.max_ratio = std::max(report.max_ratio, ratio);
  }
  const double tol = 1e-12;
  report.pass = report.min_ratio >= spec.lambda * (1.0 - tol) &&
                report.max_ratio <= spec.Lambda * (1.0 + tol);
  return report;
}

UjsReport verify_ujs(const KernelSpec& spec, double r, const SamplePlan& plan) {
  spec.validate();
  if (plan.count == 0) throw std::invalid_argument("sample plan must be nonempty");
  if (!(r > 0.0)) throw std::invalid_argument("ball radius must be positive");
  constexpr int kNodes = 64;
  SampleRng rng(plan.seed);
  const Interval& rt = plan.range("t");
  const Interval& rx = plan.range("x");
  const Interval& ry = plan.range("y");
  UjsReport report;
  report.quad_tol = 1.0 / kNodes;  // midpoint-rule resolution of the ball mean
  for (std::uint64_t i = 0; i < plan.count; ++i) {
    const double t = rng.uniform(rt);
    const double x = rng.uniform(rx);
    const double y = rng.uniform(ry);
    if (!(r <= std::min(0.25, std::abs(x - y) / 4.0))) {
      throw std::invalid_argument("UJS sample violates r <= min(1/4, |x-y|/4)");
    }
    // mean of K(t;z,y) over B_r(x), composite midpoint with kNodes cells
    double mean = 0.0;
    const double dz = 2.0 * r / kNodes;
    for (int k = 0; k < kNodes; ++k) {
      const double z = x - r + (k + 0.5) * dz;
      mean += evaluate(spec, t, z, y);
    }
    mean /= kNodes;
    const double ratio = evaluate(spec, t, x, y) / (spec.Lambda * mean);
    report.worst_ratio = std::max(report.worst_ratio, ratio);
  }
  report.pass = report.worst_ratio <= 1.0 + report.quad_tol;
  return report;
}

std::string to_json(const KernelSpec& spec) {
  json j;
  j["s"] = spec.s;
  j["dim"] = spec.dim;
  j["lambda"] = spec.lambda;
  j["Lambda"] = spec.Lambda;
  j["family"] = family_name(spec.family);
  j["params"] = json::object();
  for (const auto& [k, v] : spec.family_params) j["params"][k] = v;
  return j.dump();
}

KernelSpec kernel_from_json(const std::string& text) {
  const json j = json::parse(text);
  KernelSpec spec;
  spec.s = j.at("s").get<double>();
  spec.dim = j.at("dim").get<int>();
  spec.lambda = j.at("lambda").get<double>();
  spec.Lambda = j.at("Lambda").get<double>();
  spec.family = family_from_name(j.at("family").get<std::string>());
  if (j.contains("params")) {
    for (const auto& [k, v] : j.at("params").items()) {
      spec.family_params[k] = v.get<double>();
    }
  }
  spec.validate();
  return spec;
}

}  // namespace harnack
