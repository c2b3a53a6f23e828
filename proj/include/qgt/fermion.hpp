#pragma once

// Closed-form Cluster-XY engine.
//
// H = -sum X_{i-1} Z_i X_{i+1} - h sum Z_i + lambda_y sum Y_i Y_{i+1} + lambda_x sum X_i X_{i+1}
// on a periodic chain maps, in the even fermion-parity sector, onto independent
// (k, -k) pair blocks on the antiperiodic grid. Every quantity here is built from
// the per-block scalars delta_k, epsilon_k, Delta_k and the Bogoliubov angle
// theta_k; time is in units with hbar = 1 and a pair excitation of momentum k
// rotates with phase 4 t Delta_k.

#include "qgt/kernels.hpp"
#include "qgt/kgrid.hpp"
#include "qgt/model.hpp"

#include <complex>
#include <span>
#include <vector>

namespace qgt::fermion {

/// Single-particle gaps below this are reported as near-critical.
inline constexpr double kGapFloor = 1e-12;

/// Validates N (even, >= 4) and finite couplings; throws std::invalid_argument.
void validate(const ModelParams& p);

struct Dispersion {
  double delta;
  double epsilon;
  double gap;
};

Dispersion dispersion(const ModelParams& p, double k);

/// Exact parameter derivatives; the Hamiltonian is linear in the couplings.
constexpr Vec3 grad_delta(double sin_k) { return {-sin_k, sin_k, 0.0}; }
constexpr Vec3 grad_epsilon(double cos_k) { return {-cos_k, -cos_k, -1.0}; }

struct BogoliubovAngle {
  double theta;
  bool near_critical;
};

/// theta_k = -atan2(delta_k, epsilon_k) / 2, the quadrant-resolved angle of the
/// ground state of the (k, -k) block.
BogoliubovAngle bogoliubov_angle(const ModelParams& p, double k);

struct AngleGradients {
  Vec3 theta{};
  Vec3 gap{};
  bool near_critical = false;
};

/// d theta = -(eps d delta - delta d eps) / (2 Delta^2), d Delta = (eps d eps + delta d delta) / Delta.
AngleGradients angle_and_gap_gradients(const ModelParams& p, double k);

/// Per-momentum table of block scalars and their analytic gradients.
struct BogoliubovRow {
  double k = 0.0;
  double delta = 0.0, epsilon = 0.0, gap = 0.0, theta = 0.0;
  Vec3 grad_delta{}, grad_epsilon{}, grad_theta{}, grad_gap{};
  /// theta_k(lambda) - theta_k(lambda + q); zero when no quench is attached.
  double chi = 0.0;
};

class BogoliubovTable {
 public:
  BogoliubovTable(const ModelParams& p, const KGrid& grid);
  /// Table at the quenched couplings, with chi_k filled in.
  BogoliubovTable(const QuenchSpec& q, const KGrid& grid);

  std::span<const BogoliubovRow> rows() const { return rows_; }
  bool has_chi() const { return has_chi_; }
  double min_gap() const;
  bool near_critical() const { return min_gap() < kGapFloor; }

 private:
  std::vector<BogoliubovRow> rows_;
  bool has_chi_ = false;
};

/// Shared option block for the metric entry points.
struct EngineOptions {
  Scaling scaling = Scaling::per_site;
  simd::Isa isa = simd::best_isa();
};

/// g(0): sum_k d theta_k d theta_k, independent of any quench.
MetricTensor metric_t0(const ModelParams& p, const EngineOptions& opt = {});
/// Delta g(t): the time-dependent part after the quench.
MetricTensor metric_delta(const QuenchSpec& q, double t, const EngineOptions& opt = {});
/// g(0) + Delta g(t).
MetricTensor metric_total(const QuenchSpec& q, double t, const EngineOptions& opt = {});

struct MetricPair {
  MetricTensor g0;
  MetricTensor dg;
  double min_gap_quenched = 0.0;
  MetricTensor total() const { return g0 + dg; }
};

/// Both parts at many times with a single kernel pass over the grid.
std::vector<MetricPair> metric_series(const KGrid& grid, const QuenchSpec& q, std::span<const double> times,
                                      const EngineOptions& opt = {});

/// |<Omega(lambda + dlambda, t) | Omega(lambda, t)>|^2 as a product over pair blocks.
double fidelity_sq(const QuenchSpec& q, const Vec3& dlambda, double t);
/// log of fidelity_sq, summed block by block.
double log_fidelity_sq(const QuenchSpec& q, const Vec3& dlambda, double t);

struct FidelityMetric {
  MetricTensor g;
  double step = 0.0;
  bool step_adjusted = false;
};

/// g_{mu nu}(t) = -1/2 d^2 F^2 / d dlambda^mu d dlambda^nu at dlambda = 0.
/// Second directional derivatives along e_mu and e_mu +- e_nu by the central
/// five-point stencil, with one Richardson level (h, h/2).
FidelityMetric metric_from_fidelity(const QuenchSpec& q, double t, double base_step = 1e-3,
                                    Scaling scaling = Scaling::per_site);

struct PairAmplitudes {
  std::complex<double> empty;     // on the quenched pair vacuum
  std::complex<double> occupied;  // on the quenched pair excitation
};

/// cos(chi_k) and i e^{-4 i t Delta_k(lambda + q)} sin(chi_k).
PairAmplitudes evolved_amplitudes(const QuenchSpec& q, double t, double k);

/// Purity of the state dephased in the quench eigenbasis: prod_k (1 - sin^2(2 chi_k) / 2).
double dephased_purity(const QuenchSpec& q);
double log_dephased_purity(const QuenchSpec& q);

}  // namespace qgt::fermion
