#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <stdexcept>
#include <string>

/// Seeded sampling used by the randomized inequality checkers and the kernel
/// validators. Draws are produced by mt19937_64 plus an explicit bits-to-double
/// conversion, so streams are identical across platforms and standard-library
/// implementations (std::uniform_real_distribution is not pinned by the
/// standard and would break byte-identical reports).
namespace harnack {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
};

/// A reproducible sampling request: how many samples, the seed, and the
/// closed range for each named variable.
struct SamplePlan {
  std::uint64_t count = 0;
  std::uint64_t seed = 0;
  std::map<std::string, Interval> ranges;

  const Interval& range(const std::string& name) const {
    auto it = ranges.find(name);
    if (it == ranges.end()) {
      throw std::invalid_argument("sample plan is missing a range for '" + name + "'");
    }
    return it->second;
  }
};

class SampleRng {
 public:
  explicit SampleRng(std::uint64_t seed) : gen_(seed) {}

  /// Uniform draw in [0, 1) with exactly 53 random mantissa bits.
  double unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

  double uniform(const Interval& iv) { return uniform(iv.lo, iv.hi); }

  /// Log-uniform positive draw, for variables spanning decades (u > 0 in the
  /// discrete-gradient inequality checks).
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  std::uint64_t raw() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace harnack
