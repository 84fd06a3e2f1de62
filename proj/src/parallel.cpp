#include "harnack/parallel.hpp"

#include <algorithm>
#include <cstdlib>
#include <string>

#ifdef HARNACK_HAVE_OPENMP
#include <omp.h>
#endif

namespace harnack {

int worker_threads() {
#ifdef HARNACK_HAVE_OPENMP
  static const int cached = [] {
    int n = omp_get_max_threads();
    if (const char* env = std::getenv("HARNACK_LAB_THREADS")) {
      try {
        const int cap = std::stoi(env);
        n = std::min(n, std::max(1, cap));
      } catch (...) {
        // unparsable values keep the OpenMP default
      }
    }
    return n;
  }();
  return cached;
#else
  return 1;
#endif
}

namespace serial {

void par_for(std::size_t count, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < count; ++i) body(i);
}

double block_sum(std::size_t count, const std::function<double(std::size_t)>& term) {
  // Mirrors the blocked accumulation of the parallel version exactly.
  double total = 0.0;
  for (std::size_t b = 0; b * kSumBlock < count; ++b) {
    const std::size_t lo = b * kSumBlock;
    const std::size_t hi = std::min(count, lo + kSumBlock);
    double part = 0.0;
    for (std::size_t i = lo; i < hi; ++i) part += term(i);
    total += part;
  }
  return total;
}

}  // namespace serial

namespace parallel {

void par_for(std::size_t count, const std::function<void(std::size_t)>& body) {
#ifdef HARNACK_HAVE_OPENMP
  const int nt = worker_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (long long i = 0; i < static_cast<long long>(count); ++i) {
    body(static_cast<std::size_t>(i));
  }
#else
  serial::par_for(count, body);
#endif
}

double block_sum(std::size_t count, const std::function<double(std::size_t)>& term) {
#ifdef HARNACK_HAVE_OPENMP
  const std::size_t nblocks = (count + kSumBlock - 1) / kSumBlock;
  std::vector<double> parts(nblocks, 0.0);
  const int nt = worker_threads();
#pragma omp parallel for schedule(static) num_threads(nt)
  for (long long b = 0; b < static_cast<long long>(nblocks); ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * kSumBlock;
    const std::size_t hi = std::min(count, lo + kSumBlock);
    double part = 0.0;
    for (std::size_t i = lo; i < hi; ++i) part += term(i);
    parts[static_cast<std::size_t>(b)] = part;
  }
  double total = 0.0;
  for (double p : parts) total += p;  // serial, fixed order
  return total;
#else
  return serial::block_sum(count, term);
#endif
}

}  // namespace parallel
}  // namespace harnack
