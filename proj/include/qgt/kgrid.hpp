#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qgt::fermion {

/// Antiperiodic momentum grid k = pi (2m + 1) / N, m = 0 .. N/2 - 1, with the
/// trigonometric tables the k-sum kernels read (structure of arrays).
class KGrid {
 public:
  /// Throws std::invalid_argument for odd N or N < 4.
  explicit KGrid(int n_sites);

  int n_sites() const { return n_sites_; }
  std::size_t size() const { return k_.size(); }

  std::span<const double> momenta() const { return k_; }
  std::span<const double> sin_k() const { return sin_k_; }
  std::span<const double> cos_k() const { return cos_k_; }
  std::span<const double> sin_2k() const { return sin_2k_; }
  std::span<const double> cos_2k() const { return cos_2k_; }

 private:
  int n_sites_;
  std::vector<double> k_, sin_k_, cos_k_, sin_2k_, cos_2k_;
};

inline KGrid build_k_grid(int n_sites) { return KGrid(n_sites); }

}  // namespace qgt::fermion
