#include "qgt/dynamics.hpp"

#include "qgt/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace qgt::dynamics {

using C = std::complex<double>;
using ed::CVector;

ResonanceCheck non_resonance_check(const Vector& energies, double tol) {
  const auto d = static_cast<std::size_t>(energies.size());
  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return energies[a] < energies[b]; });

  for (std::size_t i = 0; i + 1 < d; ++i) {
    const auto a = order[i], b = order[i + 1];
    if (energies[b] - energies[a] < tol) return {false, ResonanceWitness{b, a, a, b}};
  }

  struct Gap {
    double w;
    Eigen::Index n, m;
  };
  std::vector<Gap> gaps;
  gaps.reserve(d * (d - 1) / 2);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < i; ++j) gaps.push_back({energies[order[i]] - energies[order[j]], order[i], order[j]});
  std::sort(gaps.begin(), gaps.end(), [](const Gap& x, const Gap& y) { return x.w < y.w; });
  for (std::size_t i = 0; i + 1 < gaps.size(); ++i)
    if (gaps[i + 1].w - gaps[i].w < tol)
      return {false, ResonanceWitness{gaps[i].n, gaps[i].m, gaps[i + 1].n, gaps[i + 1].m}};
  return {true, std::nullopt};
}

ResonanceCheck non_resonance_check(const SpectralDecomposition& spec, double tol) {
  return non_resonance_check(spec.energies(), tol);
}

void CorrelationSeries::validate() const {
  if (times.size() < 2) throw std::invalid_argument("correlation series needs at least two sample times");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || times[i] < 0.0) throw std::invalid_argument("sample times must be finite and nonnegative");
    if (i > 0 && !(times[i] > times[i - 1])) throw std::invalid_argument("sample times must be strictly increasing");
  }
  const auto n = static_cast<Eigen::Index>(times.size());
  if (values.rows() != n || values.cols() != n) throw std::invalid_argument("correlation values must be times x times");
  if (!values.allFinite()) throw std::invalid_argument("correlation values must be finite");
}

std::vector<double> trapezoid_weights(std::span<const double> times) {
  if (times.size() < 2) throw std::invalid_argument("trapezoid weights need at least two points");
  const double span = times.back() - times.front();
  if (!(span > 0.0)) throw std::invalid_argument("trapezoid weights need a nonempty interval");
  std::vector<double> w(times.size(), 0.0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double h = 0.5 * (times[i + 1] - times[i]) / span;
    w[i] += h;
    w[i + 1] += h;
  }
  return w;
}

namespace {

C weighted_mean(const CMatrix& v, const std::vector<double>& w) {
  C m = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    for (std::size_t i = 0; i < w.size(); ++i)
      m += w[i] * w[j] * v(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return m;
}

}  // namespace

VarianceReport temporal_variance(const CorrelationSeries& series) {
  series.validate();
  const auto w = trapezoid_weights(series.times);
  VarianceReport r;
  r.mean = weighted_mean(series.values, w);
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    for (std::size_t i = 0; i < w.size(); ++i)
      s += w[i] * w[j] * std::norm(series.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - r.mean);
  r.sigma_sq = s;
  return r;
}

double tail_fraction(const CorrelationSeries& series, double k_sigma) {
  const VarianceReport r = temporal_variance(series);
  const double cut = k_sigma * std::sqrt(r.sigma_sq);
  const auto w = trapezoid_weights(series.times);
  double f = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    for (std::size_t i = 0; i < w.size(); ++i)
      if (std::abs(series.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) - r.mean) > cut)
        f += w[i] * w[j];
  return f;
}

double variance_bound(const Matrix& a, double purity) {
  const double n = ed::operator_norm(a);
  return n * n * n * n * purity;
}

VarianceReport check_variance(const CorrelationSeries& series, const Matrix& a, double purity, bool non_resonant) {
  VarianceReport r = temporal_variance(series);
  r.bound = variance_bound(a, purity);
  r.satisfied = r.sigma_sq <= r.bound;
  r.non_resonant = non_resonant;
  return r;
}

CorrelationSeries connected_correlator_series(const QuenchSystem& system, const Matrix& a,
                                              std::span<const double> times) {
  const Vector& e = system.quench_spectrum().energies();
  const Vector& c = system.quench_coefficients();
  const auto n = static_cast<Eigen::Index>(times.size());
  // Columns A(t) psi_0 in the H^q eigenbasis.
  CMatrix x(c.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double t = times[static_cast<std::size_t>(i)];
    CVector ct(c.size());
    for (Eigen::Index m = 0; m < c.size(); ++m) ct[m] = std::polar(c[m], -t * e[m]);
    CVector y = a.cast<C>() * ct;
    for (Eigen::Index m = 0; m < c.size(); ++m) y[m] *= std::polar(1.0, t * e[m]);
    x.col(i) = y;
  }
  const CVector mean = x.transpose() * c.cast<C>();
  CorrelationSeries s;
  s.times.assign(times.begin(), times.end());
  s.values = x.adjoint() * x - mean.conjugate() * mean.transpose();
  s.validate();
  return s;
}

double time_average_corr(const Matrix& a, const Vector& c, const SpectralDecomposition& spec) {
  double s = 0.0;
  for (auto [first, last] : spec.blocks()) {
    const Eigen::Index len = last - first;
    s += (a.block(first, first, len, len) * c.segment(first, len)).squaredNorm();
  }
  return s;
}

double time_average_corr(const Matrix& a, const Matrix& rho, const SpectralDecomposition& spec) {
  double s = 0.0;
  for (auto [first, last] : spec.blocks()) {
    const Eigen::Index len = last - first;
    const Matrix ab = a.block(first, first, len, len);
    s += (rho.block(first, first, len, len) * ab * ab).trace();
  }
  return s;
}

double time_average_connected(const Matrix& a, const Vector& c, const SpectralDecomposition& spec) {
  double mean = 0.0;
  for (auto [first, last] : spec.blocks()) {
    const Eigen::Index len = last - first;
    mean += c.segment(first, len).dot(a.block(first, first, len, len) * c.segment(first, len));
  }
  return time_average_corr(a, c, spec) - mean * mean;
}

EquilibrationReport equilibration_report(const QuenchSystem& system, Coord mu, std::span<const double> times) {
  EquilibrationReport r;
  r.direction = mu;
  const Matrix& a = system.derivative_quench_basis(mu);
  r.c_bar = time_average_connected(a, system.quench_coefficients(), system.quench_spectrum());
  r.purity = system.dephased_purity();
  r.dh_norm = ed::operator_norm(system.derivative(mu));
  r.q0 = system.q_general(mu, 0.0);
  r.non_resonant = non_resonance_check(system.quench_spectrum()).non_resonant;
  const double norm4 = std::pow(r.dh_norm, 4);

  for (double t : times) {
    const double q1 = system.q1_spectral(mu, t);
    const double qt = system.q_general(mu, t);
    const double asym = t * t * r.c_bar;
    const double x = q1 - asym;
    const double cross = 2.0 * std::sqrt(r.q0 * q1);
    r.t.push_back(t);
    r.q1.push_back(q1);
    r.asymptote.push_back(asym);
    r.x.push_back(x);
    r.x_bound.push_back(t * t * norm4 * r.purity);
    r.q.push_back(qt);
    r.triangle_lo.push_back(r.q0 + q1 - cross);
    r.triangle_hi.push_back(r.q0 + q1 + cross);
    r.drift.push_back(qt - r.q0 - asym);
    r.drift_bound.push_back(2.0 * t * std::sqrt(r.q0 * std::max(r.c_bar, 0.0)) + std::abs(x) +
                            2.0 * std::sqrt(r.q0 * std::abs(x)));
    r.otoc_rhs.push_back(otoc_rhs_global(system, mu, t));
  }
  return r;
}

namespace {

double initial_gap(const QuenchSystem& system) {
  const double gap = system.initial_spectrum().gap();
  if (gap < ed::kDegeneracyTol) throw ed::DegeneracyError("OTOC bound needs a gapped initial Hamiltonian", gap);
  return gap;
}

}  // namespace

double otoc_rhs_global(const QuenchSystem& system, Coord mu, double t) {
  const double gap = initial_gap(system);
  const CVector psi = system.ground_state().cast<C>();
  const CMatrix h = system.hamiltonian().cast<C>();
  const CMatrix dt = system.d_tilde(system.derivative_quench_basis(mu), t);
  const CVector w = h * system.apply_quench_basis(dt, psi) - system.apply_quench_basis(dt, h * psi);
  return w.squaredNorm() / (gap * gap);
}

double otoc_rhs_local(const QuenchSystem& system, Coord mu, double t, const std::vector<Matrix>& h_terms) {
  const double gap = initial_gap(system);
  const int n = system.n_sites();
  const CVector psi = system.ground_state().cast<C>();
  std::vector<CVector> h_psi;
  for (const Matrix& hi : h_terms) h_psi.push_back(hi.cast<C>() * psi);

  CMatrix w(psi.size(), static_cast<Eigen::Index>(h_terms.size()) * n);
  Eigen::Index col = 0;
  for (int j = 0; j < n; ++j) {
    const CMatrix dj =
        system.d_tilde(system.quench_spectrum().to_eigenbasis(ed::local_derivative_operator(mu, j, n)), t);
    const CVector dj_psi = system.apply_quench_basis(dj, psi);
    for (std::size_t i = 0; i < h_terms.size(); ++i)
      w.col(col++) = h_terms[i].cast<C>() * dj_psi - system.apply_quench_basis(dj, h_psi[i]);
  }
  const CMatrix gram = w.adjoint() * w;
  return gram.sum().real() / (gap * gap);
}

OtocCheck otoc_bound_check(const QuenchSystem& system, Coord mu, double t) {
  OtocCheck c;
  c.lhs = system.q1_spectral(mu, t);
  c.rhs = otoc_rhs_global(system, mu, t);
  c.q_general = system.q_general(mu, t);
  c.satisfied = c.lhs <= c.rhs + 1e-9;
  return c;
}

void LRBoundParams::validate() const {
  const auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(k_const) || !positive(v_lr) || !positive(a) || !positive(dh_max_norm))
    throw std::invalid_argument("Lieb-Robinson constants k, v, a and the local norm must be positive");
  if (!std::isfinite(chi) || chi < 0.0) throw std::invalid_argument("correlation length must be nonnegative");
  for (double d : distances)
    if (!std::isfinite(d) || d < 0.0) throw std::invalid_argument("distances must be nonnegative");
}

std::vector<double> periodic_distances(int n_sites) {
  if (n_sites < 1) throw std::invalid_argument("need at least one site");
  std::vector<double> d;
  for (int j = 0; j < n_sites; ++j) d.push_back(std::min(j, n_sites - j));
  return d;
}

LRBoundParams conservative_lr_params(const QuenchSystem& system, Coord mu) {
  const int n = system.n_sites();
  double local = 0.0;
  for (int j = 0; j < n; ++j) local = std::max(local, ed::operator_norm(ed::local_derivative_operator(mu, j, n)));

  const auto& spec = system.quench_spectrum();
  const Eigen::Index above = spec.blocks().front().second;
  if (above >= spec.dimension()) throw ed::DegeneracyError("quench Hamiltonian has a single level", 0.0);
  const double gap = spec.energies()[above] - spec.energies()[0];

  LRBoundParams p;
  p.k_const = 10.0;
  p.v_lr = 4.0 * local;
  p.chi = 2.0 * p.v_lr / gap;
  p.a = 1.0;
  p.dh_max_norm = local;
  p.distances = periodic_distances(n);
  p.validate();
  return p;
}

double lr_envelope(const LRBoundParams& p, double t) {
  p.validate();
  const double len = p.chi + p.a;
  double tail = 0.0;
  for (double d : p.distances) tail += std::exp(-d / len);
  return p.k_const * p.dh_max_norm * p.dh_max_norm * 4.0 * t * t * std::exp(2.0 * p.v_lr * t / len) * tail;
}

double lr_pair_bound(const LRBoundParams& p, double d, double t1, double t2) {
  p.validate();
  const double len = p.chi + p.a;
  const double s = std::exp(p.v_lr * std::abs(t1) / len) + std::exp(p.v_lr * std::abs(t2) / len);
  return p.k_const * std::exp(-d / len) * s * s;
}

std::vector<double> default_time_grid(double min_gap, int points) {
  if (!std::isfinite(min_gap) || min_gap <= 0.0) throw std::invalid_argument("time grid needs a positive gap");
  if (points < 2) throw std::invalid_argument("time grid needs at least two points");
  const double t_max = 50.0 / min_gap;
  std::vector<double> t(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) t[static_cast<std::size_t>(i)] = t_max * i / (points - 1);
  return t;
}

double slowest_quench_gap(const QuenchSystem& system) {
  const int n = system.n_sites();
  if (n >= 4 && n % 2 == 0) {
    const double g = fermion::BogoliubovTable(system.quench().quenched(), fermion::KGrid(n)).min_gap();
    if (g > ed::kDegeneracyTol) return g;
  }
  return system.quench_spectrum().gap();
}

Vector symmetry_breaking_field(int n_sites, double strength, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Vector f(n_sites);
  for (int i = 0; i < n_sites; ++i) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    f[i] = strength * (2.0 * u - 1.0);
  }
  return f;
}

}  // namespace qgt::dynamics
