#pragma once

#include <cstddef>
#include <string>
#include <vector>

/// Uniform cell-centered grids on [-L, L] with a declared exterior policy.
namespace harnack {

/// How the complement of [-L, L] is treated when the nonlocal operator acts.
enum class ExteriorPolicy {
  zero_exterior,     ///< u = 0 outside the box (localized Cauchy data)
  dirichlet_data,    ///< prescribed exterior values g(t, y)
  truncated_global,  ///< exterior carries the matched far-field decay of u
};

std::string exterior_policy_name(ExteriorPolicy policy);
ExteriorPolicy exterior_policy_from_name(const std::string& name);

/// Cell-centered uniform grid: n odd cells of width h = 2L/n on [-L, L],
/// node i at x_i = -L + (i + 1/2) h, so x_{(n-1)/2} = 0 exactly.
class Grid {
 public:
  Grid(double half_width, std::size_t cells, ExteriorPolicy policy);

  double half_width() const { return half_width_; }
  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  ExteriorPolicy exterior_policy() const { return policy_; }

  double node(std::size_t i) const { return -half_width_ + (static_cast<double>(i) + 0.5) * h_; }
  const std::vector<double>& nodes() const { return nodes_; }
  std::size_t center_index() const { return (n_ - 1) / 2; }

  /// Index of the node nearest to x (clamped to the grid).
  std::size_t nearest_index(double x) const;

  std::string to_json() const;
  static Grid from_json(const std::string& text);

 private:
  double half_width_ = 0.0;
  std::size_t n_ = 0;
  double h_ = 0.0;
  ExteriorPolicy policy_ = ExteriorPolicy::zero_exterior;
  std::vector<double> nodes_;
};

}  // namespace harnack
