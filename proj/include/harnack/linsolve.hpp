#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <list>
#include <memory>
#include <span>
#include <vector>

#include "harnack/op.hpp"

/// Linear algebra for the implicit time step (I + dt A(t)) u = rhs.
namespace harnack {

struct SolveStats {
  std::size_t iterations = 0;  ///< 0 for a direct solve
  double rel_residual = 0.0;   ///< of the full system, measured a posteriori
};

/// Dense LL^T factorization of a symmetric positive-definite matrix
/// (row-major input). Throws std::runtime_error when a pivot fails.
class CholeskyFactor {
 public:
  CholeskyFactor(std::vector<double> matrix, std::size_t n);
  std::vector<double> solve(std::span<const double> rhs) const;
  std::size_t size() const { return n_; }

 private:
  std::vector<double> lower_;
  std::size_t n_;
};

/// Jacobi-preconditioned conjugate gradients. matvec(in, out) applies the
/// SPD matrix; diag is its diagonal; x carries the warm start in and the
/// solution out. Stops at ||b - Bx|| <= rel_tol * ||b||; throws
/// std::runtime_error if max_iter is exhausted first.
SolveStats conjugate_gradient(const std::function<void(const double*, double*)>& matvec,
                              std::span<const double> diag, std::span<const double> rhs,
                              std::vector<double>& x, double rel_tol, std::size_t max_iter);

/// Solver for one implicit step (I + dt A(t)) u = rhs with A frozen in an
/// OperatorMatrix. Uses a dense Cholesky factorization of the symmetric part
/// when n <= 1024 and warm-started Jacobi-CG above; the matched-decay
/// closure columns enter as a rank-2 correction via the Woodbury identity.
/// Each solve is verified a posteriori to relative residual 1e-12.
///
/// Holds a reference to the OperatorMatrix: the matrix must outlive the
/// solver (StepEngine keeps both together).
class ImplicitSolver {
 public:
  ImplicitSolver(const OperatorMatrix& op, double dt);

  /// Solves against the symmetric-plus-closure system, warm-starting the
  /// iterative path from this solver's previous solution. The exterior load
  /// is a right-hand-side term, not part of the matrix, so it is ignored
  /// here.
  std::vector<double> solve(std::span<const double> rhs);

  /// Same, but warm-starting from the given vector (used when one solver
  /// serves several independent evolutions, e.g. heat-kernel columns).
  std::vector<double> solve(std::span<const double> rhs, std::span<const double> warm_start);

  const SolveStats& last_stats() const { return stats_; }
  double dt() const { return dt_; }

  static constexpr std::size_t kDenseLimit = 1024;
  static constexpr double kResidualTol = 1e-12;

 private:
  std::vector<double> solve_full(std::span<const double> rhs, std::span<const double> warm,
                                 bool keep_warm);
  std::vector<double> solve_base(std::span<const double> rhs, std::span<const double> warm);
  void base_matvec(const double* in, double* out) const;
  void full_matvec(const double* in, double* out) const;

  const OperatorMatrix& op_;
  double dt_ = 0.0;
  std::unique_ptr<CholeskyFactor> chol_;
  std::vector<double> base_diag_;
  std::vector<double> warm_;
  bool has_closure_ = false;
  std::vector<double> w_left_, w_right_;  ///< B^{-1} (dt * closure columns)
  double capacitance_[4] = {0, 0, 0, 0};  ///< 2x2 (I - V^T B^{-1} U)
  SolveStats stats_;
};

/// Assembled operator plus its step solver for one kernel time piece.
struct StepEngine {
  std::int64_t key;
  OperatorMatrix op;
  ImplicitSolver solver;

  StepEngine(std::int64_t key_in, const KernelSpec& spec, const Grid& grid, double t_kernel,
             double dt);
};

/// Small LRU pool of step engines keyed by the kernel's time piece. Kernels
/// are piecewise constant in time, so one engine per piece suffices; the
/// default capacity covers the oscillating family's whole key set while
/// bounding memory for families with unboundedly many pieces.
class StepEngineCache {
 public:
  StepEngineCache(const KernelSpec& spec, const Grid& grid, double dt,
                  std::size_t capacity = 4);

  /// Engine for the piece containing t_kernel; assembles on a miss.
  StepEngine& at_time(double t_kernel);

 private:
  const KernelSpec& spec_;
  const Grid& grid_;
  double dt_;
  std::size_t capacity_;
  std::list<std::unique_ptr<StepEngine>> entries_;
};

}  // namespace harnack
