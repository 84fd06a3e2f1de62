#pragma once

#include <cstddef>
#include <functional>
#include <vector>

/// Deterministic parallel primitives.
///
/// Every parallel loop in the library writes each output slot exactly once,
/// and every parallel reduction accumulates fixed-size blocks that are then
/// combined serially in block order. Consequently results are bitwise
/// identical no matter how many threads run, which the reproducibility
/// contract (byte-identical reports for a fixed config + seed) relies on.
/// The serial namespace keeps reference implementations used by tests and by
/// the benchmark target.
namespace harnack {

/// Number of worker threads the process will use. Reads HARNACK_LAB_THREADS
/// (values < 1 are treated as 1); without OpenMP this is always 1.
int worker_threads();

namespace serial {

/// Plain sequential loop, the reference implementation for parallel::par_for.
void par_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Sequential sum over the same 1024-term blocks parallel::block_sum uses,
/// so the two agree bitwise.
double block_sum(std::size_t count, const std::function<double(std::size_t)>& term);

}  // namespace serial

namespace parallel {

/// Runs body(i) for i in [0, count). Bodies must write disjoint locations.
void par_for(std::size_t count, const std::function<void(std::size_t)>& body);

/// Sum of term(i) for i in [0, count), accumulated in fixed blocks of 1024
/// terms; the per-block partial sums are added serially in block order, so
/// the result is independent of the thread count (and equals the serial sum
/// of the same blocking, not necessarily the naive left-to-right sum).
double block_sum(std::size_t count, const std::function<double(std::size_t)>& term);

}  // namespace parallel

/// Block size shared by parallel::block_sum and its serial twin in tests.
inline constexpr std::size_t kSumBlock = 1024;

}  // namespace harnack
