#include "qgt/kgrid.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qgt::fermion {

KGrid::KGrid(int n_sites) : n_sites_(n_sites) {
  if (n_sites < 4) throw std::invalid_argument("N must be at least 4 (got " + std::to_string(n_sites) + ")");
  if (n_sites % 2 != 0) throw std::invalid_argument("N must be even (got " + std::to_string(n_sites) + ")");
  const auto half = static_cast<std::size_t>(n_sites / 2);
  k_.resize(half);
  sin_k_.resize(half);
  cos_k_.resize(half);
  sin_2k_.resize(half);
  cos_2k_.resize(half);
  for (std::size_t m = 0; m < half; ++m) {
    const double k = std::numbers::pi * static_cast<double>(2 * m + 1) / n_sites;
    k_[m] = k;
    sin_k_[m] = std::sin(k);
    cos_k_[m] = std::cos(k);
    sin_2k_[m] = std::sin(2.0 * k);
    cos_2k_[m] = std::cos(2.0 * k);
  }
}

}  // namespace qgt::fermion
