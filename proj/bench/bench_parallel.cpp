// Times the parallel primitives against their serial reference
// implementations on the two workloads that dominate the library's runtime:
// dense operator rows (assembly-shaped work and matvecs) and long block
// sums. Also asserts that the parallel results match the serial reference,
// which is the contract the deterministic reports rely on.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <span>
#include <vector>

#include "harnack/grid.hpp"
#include "harnack/kernels.hpp"
#include "harnack/op.hpp"
#include "harnack/parallel.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double best_of(int reps, const std::function<void()>& body) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto start = Clock::now();
    body();
    const std::chrono::duration<double, std::milli> ms = Clock::now() - start;
    best = std::min(best, ms.count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-28s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main() {
  harnack::KernelSpec spec;
  spec.s = 0.5;
  spec.lambda = spec.Lambda = 1.0 / M_PI;
  spec.family_params = {{"a", 1.0 / M_PI}};
  const harnack::Grid grid(30.0, 1201, harnack::ExteriorPolicy::zero_exterior);
  const std::size_t n = grid.size();

  std::printf("threads: %d\n", harnack::worker_threads());
  std::printf("%-28s %13s %13s %9s\n", "workload", "serial", "parallel", "speedup");

  // Operator assembly: each row integrates the kernel against the grid.
  harnack::OperatorMatrix op;
  const double assembly_par = best_of(3, [&] { op = harnack::assemble(spec, grid, 0.0); });

  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = 1.0 / (1.0 + grid.node(i) * grid.node(i));

  // Dense matvec over the assembled rows, serial loop vs parallel rows.
  std::vector<double> serial_out(n, 0.0);
  const auto row_body = [&](std::vector<double>& out) {
    return [&, out_ptr = out.data()](std::size_t i) {
      const double* row = op.weights.data() + i * n;
      double acc = 0.0;
      for (std::size_t j = 0; j < n; ++j) acc += row[j] * (u[i] - u[j]);
      out_ptr[i] = acc + op.tail[i] * u[i];
    };
  };
  const double matvec_serial =
      best_of(5, [&] { harnack::serial::par_for(n, row_body(serial_out)); });
  std::vector<double> parallel_out(n, 0.0);
  const double matvec_parallel =
      best_of(5, [&] { harnack::parallel::par_for(n, row_body(parallel_out)); });
  for (std::size_t i = 0; i < n; ++i) {
    if (serial_out[i] != parallel_out[i]) {
      std::fprintf(stderr, "matvec mismatch at %zu\n", i);
      return 1;
    }
  }

  // Long reduction, naive left-to-right vs blocked parallel sum.
  const std::size_t terms = 1u << 25;
  const auto term = [](std::size_t i) { return std::sqrt(static_cast<double>(i) + 0.25); };
  double serial_sum = 0.0;
  const double sum_serial =
      best_of(3, [&] { serial_sum = harnack::serial::block_sum(terms, term); });
  double parallel_sum = 0.0;
  const double sum_parallel =
      best_of(3, [&] { parallel_sum = harnack::parallel::block_sum(terms, term); });
  // Both sides accumulate the same 1024-term blocks in the same order.
  if (parallel_sum != serial_sum) {
    std::fprintf(stderr, "block_sum mismatch: %.17g vs %.17g\n", serial_sum, parallel_sum);
    return 1;
  }
  // The parallel sum must also be reproducible run to run.
  if (parallel_sum != harnack::parallel::block_sum(terms, term)) {
    std::fprintf(stderr, "block_sum not deterministic\n");
    return 1;
  }

  std::printf("%-28s %13s %10.2f ms\n", "operator assembly", "-", assembly_par);
  report("dense matvec (1201 rows)", matvec_serial, matvec_parallel);
  report("block sum (2^25 terms)", sum_serial, sum_parallel);
  return 0;
}
