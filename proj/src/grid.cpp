#include "harnack/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace harnack {

std::string exterior_policy_name(ExteriorPolicy policy) {
  switch (policy) {
    case ExteriorPolicy::zero_exterior:
      return "zero_exterior";
    case ExteriorPolicy::dirichlet_data:
      return "dirichlet_data";
    case ExteriorPolicy::truncated_global:
      return "truncated_global";
  }
  throw std::logic_error("exterior_policy_name: unreachable");
}

ExteriorPolicy exterior_policy_from_name(const std::string& name) {
  if (name == "zero_exterior") return ExteriorPolicy::zero_exterior;
  if (name == "dirichlet_data") return ExteriorPolicy::dirichlet_data;
  if (name == "truncated_global") return ExteriorPolicy::truncated_global;
  throw std::invalid_argument("unknown exterior policy: " + name);
}

Grid::Grid(double half_width, std::size_t cells, ExteriorPolicy policy)
    : half_width_(half_width), n_(cells), policy_(policy) {
  if (!(half_width_ > 0.0)) {
    throw std::invalid_argument("Grid: half width must be positive");
  }
  if (n_ < 17 || n_ % 2 == 0) {
    throw std::invalid_argument("Grid: cell count must be odd and at least 17");
  }
  h_ = 2.0 * half_width_ / static_cast<double>(n_);
  nodes_.resize(n_);
  for (std::size_t i = 0; i < n_; ++i) nodes_[i] = node(i);
}

std::size_t Grid::nearest_index(double x) const {
  const double raw = (x + half_width_) / h_ - 0.5;
  const double clamped = std::clamp(raw, 0.0, static_cast<double>(n_ - 1));
  return static_cast<std::size_t>(std::llround(clamped));
}

std::string Grid::to_json() const {
  nlohmann::ordered_json j;
  j["L"] = half_width_;
  j["n"] = n_;
  j["ext_policy"] = exterior_policy_name(policy_);
  return j.dump();
}

Grid Grid::from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  if (!j.contains("L") || !j.contains("n") || !j.contains("ext_policy")) {
    throw std::invalid_argument("Grid::from_json: need keys L, n, ext_policy");
  }
  return Grid(j.at("L").get<double>(), j.at("n").get<std::size_t>(),
              exterior_policy_from_name(j.at("ext_policy").get<std::string>()));
}

}  // namespace harnack
