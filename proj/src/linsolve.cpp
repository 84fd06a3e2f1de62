#include "harnack/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "harnack/parallel.hpp"

namespace harnack {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return parallel::block_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

CholeskyFactor::CholeskyFactor(std::vector<double> matrix, std::size_t n)
    : lower_(std::move(matrix)), n_(n) {
  if (lower_.size() != n_ * n_) {
    throw std::invalid_argument("CholeskyFactor: matrix size does not match n");
  }
  double* a = lower_.data();
  for (std::size_t j = 0; j < n_; ++j) {
    double d = a[j * n_ + j];
    for (std::size_t k = 0; k < j; ++k) d -= a[j * n_ + k] * a[j * n_ + k];
    if (!(d > 0.0)) {
      throw std::runtime_error("CholeskyFactor: matrix is not positive definite");
    }
    const double ljj = std::sqrt(d);
    a[j * n_ + j] = ljj;
    parallel::par_for(n_ - j - 1, [&](std::size_t offset) {
      const std::size_t i = j + 1 + offset;
      double v = a[i * n_ + j];
      for (std::size_t k = 0; k < j; ++k) v -= a[i * n_ + k] * a[j * n_ + k];
      a[i * n_ + j] = v / ljj;
    });
  }
  // Zero the strictly upper triangle so the factor is self-describing.
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = i + 1; j < n_; ++j) a[i * n_ + j] = 0.0;
  }
}

std::vector<double> CholeskyFactor::solve(std::span<const double> rhs) const {
  if (rhs.size() != n_) throw std::invalid_argument("CholeskyFactor::solve: length mismatch");
  std::vector<double> x(rhs.begin(), rhs.end());
  const double* a = lower_.data();
  for (std::size_t i = 0; i < n_; ++i) {  // L y = rhs
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= a[i * n_ + k] * x[k];
    x[i] = v / a[i * n_ + i];
  }
  for (std::size_t ii = n_; ii-- > 0;) {  // L^T x = y
    double v = x[ii];
    for (std::size_t k = ii + 1; k < n_; ++k) v -= a[k * n_ + ii] * x[k];
    x[ii] = v / a[ii * n_ + ii];
  }
  return x;
}

SolveStats conjugate_gradient(const std::function<void(const double*, double*)>& matvec,
                              std::span<const double> diag, std::span<const double> rhs,
                              std::vector<double>& x, double rel_tol, std::size_t max_iter) {
  const std::size_t n = rhs.size();
  if (x.size() != n) x.assign(n, 0.0);
  const double rhs_norm = norm2(rhs);
  if (rhs_norm == 0.0) {
    x.assign(n, 0.0);
    return SolveStats{};
  }

  std::vector<double> r(n), z(n), p(n), q(n);
  matvec(x.data(), q.data());
  for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - q[i];
  const double target = rel_tol * rhs_norm;

  SolveStats stats;
  double res = norm2(r);
  if (res <= target) {
    stats.rel_residual = res / rhs_norm;
    return stats;
  }

  for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
  p = z;
  double rz = dot(r, z);

  for (std::size_t it = 1; it <= max_iter; ++it) {
    matvec(p.data(), q.data());
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw std::runtime_error("conjugate_gradient: matrix not positive definite");
    const double alpha = rz / pq;
    for (std::size_t i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * q[i];
    }
    res = norm2(r);
    if (res <= target) {
      stats.iterations = it;
      stats.rel_residual = res / rhs_norm;
      return stats;
    }
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    const double rz_next = dot(r, z);
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
  }
  throw std::runtime_error("conjugate_gradient: no convergence within iteration budget");
}

ImplicitSolver::ImplicitSolver(const OperatorMatrix& op, double dt) : op_(op), dt_(dt) {
  if (!(dt_ > 0.0)) throw std::invalid_argument("ImplicitSolver: dt must be positive");
  const std::size_t n = op_.n;
  has_closure_ = !op_.closure_left.empty();

  base_diag_.resize(n);
  for (std::size_t i = 0; i < n; ++i) base_diag_[i] = 1.0 + dt_ * op_.row_diag[i];

  if (n <= kDenseLimit) {
    std::vector<double> b(n * n);
    parallel::par_for(n, [&](std::size_t i) {
      const double* wrow = op_.weights.data() + i * n;
      double* brow = b.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) brow[j] = -dt_ * wrow[j];
      brow[i] = base_diag_[i];
    });
    chol_ = std::make_unique<CholeskyFactor>(std::move(b), n);
  }

  if (has_closure_) {
    std::vector<double> ul(n), ur(n);
    for (std::size_t i = 0; i < n; ++i) {
      ul[i] = dt_ * op_.closure_left[i];
      ur[i] = dt_ * op_.closure_right[i];
    }
    const std::vector<double> empty;
    w_left_ = solve_base(ul, empty);
    w_right_ = solve_base(ur, empty);
    // capacitance = I - V^T [w_left w_right], V = [e_0, e_{n-1}]
    capacitance_[0] = 1.0 - w_left_[0];
    capacitance_[1] = -w_right_[0];
    capacitance_[2] = -w_left_[n - 1];
    capacitance_[3] = 1.0 - w_right_[n - 1];
    const double det = capacitance_[0] * capacitance_[3] - capacitance_[1] * capacitance_[2];
    if (std::abs(det) < 1e-14) {
      throw std::runtime_error("ImplicitSolver: closure capacitance matrix is singular");
    }
  }
}

void ImplicitSolver::base_matvec(const double* in, double* out) const {
  const std::size_t n = op_.n;
  parallel::par_for(n, [&](std::size_t i) {
    const double* row = op_.weights.data() + i * n;
    double coupled = 0.0;
    for (std::size_t j = 0; j < n; ++j) coupled += row[j] * in[j];
    out[i] = base_diag_[i] * in[i] - dt_ * coupled;
  });
}

void ImplicitSolver::full_matvec(const double* in, double* out) const {
  base_matvec(in, out);
  if (has_closure_) {
    const std::size_t n = op_.n;
    const double u0 = in[0];
    const double un = in[n - 1];
    for (std::size_t i = 0; i < n; ++i) {
      out[i] -= dt_ * (op_.closure_left[i] * u0 + op_.closure_right[i] * un);
    }
  }
}

std::vector<double> ImplicitSolver::solve_base(std::span<const double> rhs,
                                               std::span<const double> warm) {
  const std::size_t n = op_.n;
  if (chol_) {
    stats_ = SolveStats{};
    std::vector<double> x = chol_->solve(rhs);
    // One round of iterative refinement keeps the a-posteriori residual
    // comfortably under the contract even near the dense size limit.
    std::vector<double> r(n);
    base_matvec(x.data(), r.data());
    for (std::size_t i = 0; i < n; ++i) r[i] = rhs[i] - r[i];
    const std::vector<double> dx = chol_->solve(r);
    for (std::size_t i = 0; i < n; ++i) x[i] += dx[i];
    return x;
  }
  std::vector<double> x(warm.size() == n ? std::vector<double>(warm.begin(), warm.end())
                                         : std::vector<double>(n, 0.0));
  stats_ = conjugate_gradient([this](const double* in, double* out) { base_matvec(in, out); },
                              base_diag_, rhs, x, kResidualTol / 10.0, 50 * n + 1000);
  return x;
}

std::vector<double> ImplicitSolver::solve_full(std::span<const double> rhs,
                                               std::span<const double> warm, bool keep_warm) {
  const std::size_t n = op_.n;
  if (rhs.size() != n) throw std::invalid_argument("ImplicitSolver::solve: length mismatch");

  std::vector<double> x = solve_base(rhs, warm);
  if (has_closure_) {
    const double z0 = x[0];
    const double zn = x[n - 1];
    // 2x2 capacitance solve: c = (I - V^T W)^{-1} V^T z.
    const double det = capacitance_[0] * capacitance_[3] - capacitance_[1] * capacitance_[2];
    const double c0 = (capacitance_[3] * z0 - capacitance_[1] * zn) / det;
    const double c1 = (-capacitance_[2] * z0 + capacitance_[0] * zn) / det;
    for (std::size_t i = 0; i < n; ++i) x[i] += w_left_[i] * c0 + w_right_[i] * c1;
  }

  std::vector<double> check(n);
  full_matvec(x.data(), check.data());
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = check[i] - rhs[i];
    num += d * d;
    den += rhs[i] * rhs[i];
  }
  const double rel = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  stats_.rel_residual = rel;
  if (!(rel <= kResidualTol)) {
    throw std::runtime_error("ImplicitSolver: residual check failed after solve");
  }
  if (keep_warm && !chol_) warm_ = x;
  return x;
}

std::vector<double> ImplicitSolver::solve(std::span<const double> rhs) {
  return solve_full(rhs, warm_, true);
}

std::vector<double> ImplicitSolver::solve(std::span<const double> rhs,
                                          std::span<const double> warm_start) {
  return solve_full(rhs, warm_start, false);
}

StepEngine::StepEngine(std::int64_t key_in, const KernelSpec& spec, const Grid& grid,
                       double t_kernel, double dt)
    : key(key_in), op(assemble(spec, grid, t_kernel)), solver(op, dt) {}

StepEngineCache::StepEngineCache(const KernelSpec& spec, const Grid& grid, double dt,
                                 std::size_t capacity)
    : spec_(spec), grid_(grid), dt_(dt), capacity_(std::max<std::size_t>(1, capacity)) {}

StepEngine& StepEngineCache::at_time(double t_kernel) {
  const std::int64_t key = time_key(spec_, t_kernel);
  for (auto it = entries_.begin(); it != entries_.end(); ++it) {
    if ((*it)->key == key) {
      entries_.splice(entries_.begin(), entries_, it);
      return **it;
    }
  }
  entries_.push_front(std::make_unique<StepEngine>(key, spec_, grid_, t_kernel, dt_));
  if (entries_.size() > capacity_) entries_.pop_back();
  return *entries_.front();
}

}  // namespace harnack
