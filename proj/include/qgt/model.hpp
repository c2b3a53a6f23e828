#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qgt {

/// Manifold coordinates of the Cluster-XY family, in storage order.
enum class Coord : int { lambda_x = 0, lambda_y = 1, h = 2 };

inline constexpr std::array<Coord, 3> kCoords{Coord::lambda_x, Coord::lambda_y, Coord::h};

constexpr int index(Coord c) { return static_cast<int>(c); }
std::string_view coord_name(Coord c);
/// Accepts "x", "y", "h" and the long forms "lambda_x", "lambda_y".
Coord parse_coord(std::string_view name);

using Vec3 = std::array<double, 3>;

constexpr Vec3 unit_vector(Coord c) {
  Vec3 v{0.0, 0.0, 0.0};
  v[static_cast<std::size_t>(index(c))] = 1.0;
  return v;
}

/// Point on the parameter manifold plus the chain length.
struct ModelParams {
  double lambda_x = 0.0;
  double lambda_y = 0.0;
  double h = 0.0;
  int n_sites = 4;

  Vec3 coords() const { return {lambda_x, lambda_y, h}; }
  ModelParams shifted(const Vec3& d) const {
    return {lambda_x + d[0], lambda_y + d[1], h + d[2], n_sites};
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Throws std::invalid_argument unless all couplings are finite.
void require_finite(const ModelParams& p);

/// Orthogonal/general quench: H(lambda) -> H(lambda + offset).
struct QuenchSpec {
  ModelParams base;
  Vec3 offset{0.0, 0.0, 0.0};

  ModelParams quenched() const { return base.shifted(offset); }
  bool trivial() const { return offset[0] == 0.0 && offset[1] == 0.0 && offset[2] == 0.0; }

  friend bool operator==(const QuenchSpec&, const QuenchSpec&) = default;
};

enum class Scaling { per_site, raw };

/// Symmetric 3x3 tensor over (lambda_x, lambda_y, h).
///
/// `rescaled` means the components were divided by the chain length.
/// `min_gap` is the smallest single-particle gap seen while building the tensor
/// (over the initial and, where relevant, the quenched Hamiltonian).
class MetricTensor {
 public:
  MetricTensor() = default;

  double operator()(int mu, int nu) const { return c_[static_cast<std::size_t>(3 * mu + nu)]; }
  double operator()(Coord mu, Coord nu) const { return (*this)(index(mu), index(nu)); }

  /// Writes both (mu, nu) and (nu, mu).
  void set(int mu, int nu, double v) {
    c_[static_cast<std::size_t>(3 * mu + nu)] = v;
    c_[static_cast<std::size_t>(3 * nu + mu)] = v;
  }

  const std::array<double, 9>& components() const { return c_; }

  MetricTensor& operator+=(const MetricTensor& o);
  MetricTensor operator+(const MetricTensor& o) const {
    MetricTensor r = *this;
    r += o;
    return r;
  }
  MetricTensor scaled(double s) const;

  /// Ascending eigenvalues q_a.
  std::array<double, 3> eigenvalues() const;
  double frobenius() const;
  /// max |a_ij - b_ij| over all nine entries.
  double max_abs_diff(const MetricTensor& o) const;
  /// Frobenius norm of the difference relative to the Frobenius norm of `reference`.
  double relative_diff(const MetricTensor& reference) const;

  bool rescaled = true;
  double time = 0.0;
  bool near_critical = false;
  double min_gap = std::numeric_limits<double>::infinity();

 private:
  std::array<double, 9> c_{};
};

std::string to_string(const MetricTensor& g);

}  // namespace qgt
