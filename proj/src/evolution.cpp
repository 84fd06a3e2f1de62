#include "harnack/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <stdexcept>
#include <utility>

#include "harnack/linsolve.hpp"

namespace harnack {

namespace {

std::size_t step_count(double t_start, double T, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  if (!(T > t_start)) throw std::invalid_argument("horizon must exceed the start time");
  const double raw = (T - t_start) / dt;
  const auto steps = static_cast<std::size_t>(std::llround(raw));
  if (steps == 0 || std::abs(static_cast<double>(steps) - raw) > 1e-8 * std::max(1.0, raw)) {
    throw std::invalid_argument("horizon must be an integer number of time steps");
  }
  return steps;
}

/// Core backward-Euler loop. kernel_time maps a solution time stamp to the
/// time the kernel is evaluated at (identity except for dual runs); load, if
/// set, returns the right-hand-side load vector for a step ending at the
/// given solution time.
SolutionField march(const KernelSpec& spec, const Grid& grid, std::span<const double> f,
                    double t_start, double T, double dt, std::size_t store_every, SolveMode mode,
                    const std::function<double(double)>& kernel_time,
                    const std::function<const std::vector<double>&(double)>& load) {
  spec.validate();
  if (f.size() != grid.size()) {
    throw std::invalid_argument("initial datum length does not match grid");
  }
  if (store_every == 0) throw std::invalid_argument("store_every must be at least 1");
  const std::size_t steps = step_count(t_start, T, dt);

  StepEngineCache cache(spec, grid, dt);
  std::vector<double> u(f.begin(), f.end());
  std::vector<double> times = {t_start};
  std::vector<std::vector<double>> frames = {u};

  for (std::size_t k = 1; k <= steps; ++k) {
    const double t_next = t_start + static_cast<double>(k) * dt;
    StepEngine& engine = cache.at_time(kernel_time(t_next));
    std::vector<double> rhs = u;
    if (load) {
      const std::vector<double>& lv = load(t_next);
      for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] += dt * lv[i];
    }
    u = engine.solver.solve(rhs);
    if (k % store_every == 0 || k == steps) {
      times.push_back(t_next);
      frames.push_back(u);
    }
  }
  return SolutionField(grid, spec, mode, dt, std::move(times), std::move(frames));
}

}  // namespace

std::string solve_mode_name(SolveMode mode) {
  switch (mode) {
    case SolveMode::cauchy:
      return "cauchy";
    case SolveMode::local_dirichlet:
      return "local_dirichlet";
    case SolveMode::dual:
      return "dual";
  }
  throw std::logic_error("solve_mode_name: unreachable");
}

SolutionField::SolutionField(Grid grid, KernelSpec kernel, SolveMode mode, double dt,
                             std::vector<double> times, std::vector<std::vector<double>> frames)
    : grid_(std::move(grid)),
      kernel_(std::move(kernel)),
      mode_(mode),
      dt_(dt),
      times_(std::move(times)),
      frames_(std::move(frames)) {
  if (times_.empty() || times_.size() != frames_.size()) {
    throw std::invalid_argument("SolutionField: times and frames must align and be nonempty");
  }
  for (std::size_t k = 1; k < times_.size(); ++k) {
    if (!(times_[k] > times_[k - 1])) {
      throw std::invalid_argument("SolutionField: times must strictly increase");
    }
  }
  for (const auto& frame : frames_) {
    if (frame.size() != grid_.size()) {
      throw std::invalid_argument("SolutionField: frame length does not match grid");
    }
  }
}

std::size_t SolutionField::frame_index(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  std::size_t best = it == times_.end() ? times_.size() - 1
                                        : static_cast<std::size_t>(it - times_.begin());
  if (best > 0 && std::abs(times_[best - 1] - t) < std::abs(times_[best] - t)) --best;
  if (std::abs(times_[best] - t) > dt_ / 2.0 + 1e-12) {
    throw std::invalid_argument("SolutionField: no stored frame within dt/2 of requested time");
  }
  return best;
}

std::size_t ExteriorData::piece(double t) const {
  std::size_t count = 0;
  for (const double bp : breakpoints) {
    if (bp < t) ++count;
  }
  return count;
}

SolutionField solve_cauchy(const KernelSpec& spec, const Grid& grid, std::span<const double> f,
                           double T, double dt, std::size_t store_every, double t_start) {
  if (grid.exterior_policy() == ExteriorPolicy::dirichlet_data) {
    throw std::invalid_argument("solve_cauchy: grid policy must be zero_exterior or truncated_global");
  }
  return march(spec, grid, f, t_start, T, dt, store_every, SolveMode::cauchy,
               [](double t) { return t; }, nullptr);
}

SolutionField solve_local(const KernelSpec& spec, const Grid& grid, std::span<const double> f,
                          const ExteriorData& g, double t_start, double T, double dt,
                          std::size_t store_every) {
  if (grid.exterior_policy() != ExteriorPolicy::dirichlet_data) {
    throw std::invalid_argument("solve_local: grid policy must be dirichlet_data");
  }
  if (!g.g) throw std::invalid_argument("solve_local: exterior data function is empty");
  if (!std::is_sorted(g.breakpoints.begin(), g.breakpoints.end())) {
    throw std::invalid_argument("solve_local: breakpoints must ascend");
  }

  // Loads keyed by (data piece, kernel time piece): both g and the kernel are
  // piecewise constant in t, so the integral is reusable within a piece pair.
  std::list<std::pair<std::pair<std::size_t, std::int64_t>, std::vector<double>>> load_cache;
  const auto load = [&](double t) -> const std::vector<double>& {
    const std::pair<std::size_t, std::int64_t> key = {g.piece(t), time_key(spec, t)};
    for (auto it = load_cache.begin(); it != load_cache.end(); ++it) {
      if (it->first == key) {
        load_cache.splice(load_cache.begin(), load_cache, it);
        return load_cache.front().second;
      }
    }
    load_cache.emplace_front(
        key, exterior_load_vector(spec, grid, t, [&](double y) { return g.g(t, y); }));
    if (load_cache.size() > 8) load_cache.pop_back();
    return load_cache.front().second;
  };

  return march(spec, grid, f, t_start, T, dt, store_every, SolveMode::local_dirichlet,
               [](double t) { return t; }, load);
}

SolutionField solve_dual(const KernelSpec& spec, const Grid& grid,
                         std::span<const double> f_terminal, double T, double dt,
                         std::size_t store_every) {
  if (grid.exterior_policy() == ExteriorPolicy::dirichlet_data) {
    throw std::invalid_argument("solve_dual: grid policy must be zero_exterior or truncated_global");
  }
  // March v(sigma) = psi(T - sigma) forward with the time-reversed kernel.
  SolutionField forward =
      march(spec, grid, f_terminal, 0.0, T, dt, store_every, SolveMode::dual,
            [T](double sigma) { return T - sigma; }, nullptr);

  const std::size_t m = forward.frame_count();
  std::vector<double> times(m);
  std::vector<std::vector<double>> frames(m);
  for (std::size_t k = 0; k < m; ++k) {
    times[k] = T - forward.time(m - 1 - k);
    frames[k] = forward.frame(m - 1 - k);
  }
  // Guard against -0.0 at the reversed origin so stamps serialize cleanly.
  for (double& t : times) {
    if (t == 0.0) t = 0.0;
  }
  return SolutionField(forward.grid(), spec, SolveMode::dual, dt, std::move(times),
                       std::move(frames));
}

SolutionField rescale(const SolutionField& field, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("rescale: tau must be positive");
  const double space_factor = std::pow(tau, 1.0 / (2.0 * field.kernel().s));
  const Grid& g = field.grid();
  Grid scaled(g.half_width() / space_factor, g.size(), g.exterior_policy());

  std::vector<double> times(field.frame_count());
  std::vector<std::vector<double>> frames(field.frame_count());
  for (std::size_t k = 0; k < field.frame_count(); ++k) {
    times[k] = field.time(k) / tau;
    frames[k] = field.frame(k);
  }
  return SolutionField(scaled, field.kernel(), field.mode(), field.dt() / tau, std::move(times),
                       std::move(frames));
}

std::vector<double> bump_datum(const Grid& grid, std::size_t index) {
  if (index >= grid.size()) throw std::invalid_argument("bump_datum: index out of range");
  std::vector<double> f(grid.size(), 0.0);
  f[index] = 1.0 / grid.spacing();
  return f;
}

double discrete_mass(const Grid& grid, std::span<const double> u) {
  double sum = 0.0;
  for (const double v : u) sum += v;
  return grid.spacing() * sum;
}

double discrete_l2(const Grid& grid, std::span<const double> u) {
  double sum = 0.0;
  for (const double v : u) sum += v * v;
  return std::sqrt(grid.spacing() * sum);
}

}  // namespace harnack
