#pragma once

// Equilibration statistics and bounds for small quenched chains: temporal
// variance, infinite-time averages, the simplified-quench asymptote, the OTOC
// bound and the light-cone envelope.

#include "qgt/quench_system.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace qgt::dynamics {

using ed::CMatrix;
using ed::Matrix;
using ed::QuenchSystem;
using ed::SpectralDecomposition;
using ed::Vector;

/// E_n - E_m = E_k - E_l (within tolerance) with (n, m) != (k, l).
struct ResonanceWitness {
  Eigen::Index n, m, k, l;
};

struct ResonanceCheck {
  bool non_resonant = true;
  std::optional<ResonanceWitness> witness;
};

/// All levels distinct and all gaps E_n - E_m (n > m) distinct within `tol`.
/// A degenerate pair a < b is reported as the witness (b, a, a, b).
ResonanceCheck non_resonance_check(const Vector& energies, double tol = ed::kDegeneracyTol);
ResonanceCheck non_resonance_check(const SpectralDecomposition& spec, double tol = ed::kDegeneracyTol);

/// C(t', t'') sampled on times x times.
struct CorrelationSeries {
  std::vector<double> times;
  CMatrix values;

  /// Throws std::invalid_argument on an empty, unsorted or mismatched grid.
  void validate() const;
};

struct VarianceReport {
  double sigma_sq = 0.0;
  std::complex<double> mean{};
  double bound = 0.0;
  bool satisfied = false;
  bool non_resonant = false;
};

/// Trapezoid weights on [t_0, t_last], normalized to one.
std::vector<double> trapezoid_weights(std::span<const double> times);

/// Discrete double average: mean C-bar and sigma^2 = avg |C - C-bar|^2.
VarianceReport temporal_variance(const CorrelationSeries& series);
/// Weighted fraction of samples with |C - C-bar| > k sigma.
double tail_fraction(const CorrelationSeries& series, double k_sigma);

/// ||A||^4 Tr(rho-bar^2).
double variance_bound(const Matrix& a, double purity);
/// Fills bound, satisfied and non_resonant.
VarianceReport check_variance(const CorrelationSeries& series, const Matrix& a, double purity, bool non_resonant);

/// <A(t') A(t'')>_C in the initial ground state, A given in the H^q eigenbasis.
CorrelationSeries connected_correlator_series(const QuenchSystem& system, const Matrix& a_quench_basis,
                                              std::span<const double> times);

/// Infinite-time average of <A(t') A(t'')> for a pure state with H^q-basis
/// coefficients `c`: sum over degenerate blocks B of ||A_BB c_B||^2.
double time_average_corr(const Matrix& a_eig, const Vector& c, const SpectralDecomposition& spec);
/// Same for a density matrix given in the H^q eigenbasis.
double time_average_corr(const Matrix& a_eig, const Matrix& rho_eig, const SpectralDecomposition& spec);
/// Connected version for a pure state: the above minus (sum_B c_B^T A_BB c_B)^2.
double time_average_connected(const Matrix& a_eig, const Vector& c, const SpectralDecomposition& spec);

struct EquilibrationReport {
  Coord direction = Coord::h;
  double c_bar = 0.0;       // asymptote coefficient: q1 ~ t^2 c_bar
  double purity = 1.0;      // Tr rho-bar^2
  double dh_norm = 0.0;     // ||d_mu H^q||
  double q0 = 0.0;          // q(0)
  bool non_resonant = false;
  std::vector<double> t, q1, asymptote, x, x_bound;
  /// General quench: q(t), the triangle window from q(0) and q1, and
  /// q(t) - q(0) - t^2 c_bar against its envelope.
  std::vector<double> q, triangle_lo, triangle_hi, drift, drift_bound;
  std::vector<double> otoc_rhs;
};

EquilibrationReport equilibration_report(const QuenchSystem& system, Coord mu, std::span<const double> times);

struct OtocCheck {
  double lhs = 0.0;        // q1(t)
  double rhs = 0.0;        // ||[H, D] psi_0||^2 / Delta^2
  double q_general = 0.0;  // reported alongside; not bounded by rhs at small t
  bool satisfied = false;
};

/// Delta^{-2} <[H, D][H, D]^dag> from the global commutator.
double otoc_rhs_global(const QuenchSystem& system, Coord mu, double t);
/// Same quantity as the sum over all (i, j, k, l) of <[H_i, D_j] [H_k, D_l]^dag>
/// for a given decomposition of H into local terms.
double otoc_rhs_local(const QuenchSystem& system, Coord mu, double t, const std::vector<Matrix>& h_terms);
OtocCheck otoc_bound_check(const QuenchSystem& system, Coord mu, double t);

struct LRBoundParams {
  double k_const = 10.0;
  double v_lr = 4.0;
  double chi = 1.0;
  double a = 1.0;
  double dh_max_norm = 1.0;
  std::vector<double> distances;

  /// Throws std::invalid_argument on non-positive constants or negative distances.
  void validate() const;
};

/// d_{0j} = min(j, N - j) on a ring.
std::vector<double> periodic_distances(int n_sites);
/// k = 10, v = 4 max_j ||d H_j||, chi = 2 v / Delta(H^q), a = 1, ring distances.
LRBoundParams conservative_lr_params(const QuenchSystem& system, Coord mu);

/// k ||dH||_M^2 4 t^2 exp(2 v t / (chi + a)) sum_j exp(-d_0j / (chi + a)).
double lr_envelope(const LRBoundParams& p, double t);
/// k exp(-d / (chi + a)) (exp(v |t'| / (chi + a)) + exp(v |t''| / (chi + a)))^2.
double lr_pair_bound(const LRBoundParams& p, double d, double t1, double t2);

/// Uniform grid of `points` samples on [0, 50 / min_gap].
std::vector<double> default_time_grid(double min_gap, int points = 200);
/// Smallest single-particle gap at the quenched couplings for even N >= 4,
/// otherwise the many-body gap of H^q.
double slowest_quench_gap(const QuenchSystem& system);

/// Uniform random Z field in [-strength, strength], reproducible across
/// platforms for a given seed.
Vector symmetry_breaking_field(int n_sites, double strength = 1e-3, std::uint64_t seed = 20240601);

}  // namespace qgt::dynamics
