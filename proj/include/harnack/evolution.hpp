#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "harnack/grid.hpp"
#include "harnack/kernels.hpp"

/// Implicit time stepping for forward, exterior-Dirichlet, and time-reversed
/// (dual) problems.
namespace harnack {

enum class SolveMode { cauchy, local_dirichlet, dual };

std::string solve_mode_name(SolveMode mode);

/// Immutable record of one run: uniformly spaced stored frames u(t_k, x_i).
/// Produced with nonnegative data it stays nonnegative frame-by-frame (the
/// implicit step matrix is an M-matrix).
class SolutionField {
 public:
  SolutionField(Grid grid, KernelSpec kernel, SolveMode mode, double dt,
                std::vector<double> times, std::vector<std::vector<double>> frames);

  const Grid& grid() const { return grid_; }
  const KernelSpec& kernel() const { return kernel_; }
  SolveMode mode() const { return mode_; }
  double dt() const { return dt_; }

  std::size_t frame_count() const { return times_.size(); }
  double time(std::size_t k) const { return times_[k]; }
  const std::vector<double>& times() const { return times_; }
  const std::vector<double>& frame(std::size_t k) const { return frames_[k]; }

  /// Index of the stored frame nearest to t; throws std::invalid_argument
  /// when none lies within dt/2.
  std::size_t frame_index(double t) const;
  const std::vector<double>& frame_at(double t) const { return frames_[frame_index(t)]; }

 private:
  Grid grid_;
  KernelSpec kernel_;
  SolveMode mode_ = SolveMode::cauchy;
  double dt_ = 0.0;
  std::vector<double> times_;
  std::vector<std::vector<double>> frames_;
};

/// Prescribed exterior values g(t, y) for |y| > L, declared piecewise
/// constant in t between consecutive breakpoints (loads are cached per piece,
/// so a g that varies inside a piece would be sampled once per piece).
struct ExteriorData {
  std::function<double(double t, double y)> g;
  std::vector<double> breakpoints;  ///< ascending times where g switches

  /// Number of breakpoints strictly before t (piece 0 = before the first).
  std::size_t piece(double t) const;
};

/// Backward-Euler Cauchy solve: (I + dt A(t_{k+1})) u^{k+1} = u^k, frame 0
/// equal to f at t_start. Grid policy must be zero_exterior or
/// truncated_global. Stores every store_every-th frame plus the final one.
SolutionField solve_cauchy(const KernelSpec& spec, const Grid& grid, std::span<const double> f,
                           double T, double dt, std::size_t store_every = 1,
                           double t_start = 0.0);

/// Exterior-Dirichlet solve on [t_start, T] with load
/// load_i(t) = int_{|y|>L} K(t;x_i,y) g(t,y) dy entering the right-hand side.
/// Grid policy must be dirichlet_data.
SolutionField solve_local(const KernelSpec& spec, const Grid& grid, std::span<const double> f,
                          const ExteriorData& g, double t_start, double T, double dt,
                          std::size_t store_every = 1);

/// Dual problem d_t psi + L_t psi = 0 with terminal datum psi(T) = f_terminal,
/// solved on [0, T] via the substitution v(sigma, x) = psi(T - sigma, x),
/// which is a forward problem driven by K(T - sigma); frames are reversed so
/// times ascend. Terminal frame equals f_terminal exactly.
SolutionField solve_dual(const KernelSpec& spec, const Grid& grid,
                         std::span<const double> f_terminal, double T, double dt,
                         std::size_t store_every = 1);

/// Parabolic rescaling v(t,x) = u(tau t, tau^{1/2s} x). The new grid is the
/// old one scaled by tau^{-1/2s} with the same node count, so every stored
/// frame maps exactly (pure relabeling, no interpolation error).
SolutionField rescale(const SolutionField& field, double tau);

/// Discrete stand-in for a point mass at node center: 1/h at one node,
/// zero elsewhere (unit discrete mass).
std::vector<double> bump_datum(const Grid& grid, std::size_t index);

/// Sum_i h u_i, the discrete mass of one frame.
double discrete_mass(const Grid& grid, std::span<const double> u);

/// sqrt(Sum_i h u_i^2), the discrete L2 norm of one frame.
double discrete_l2(const Grid& grid, std::span<const double> u);

}  // namespace harnack
