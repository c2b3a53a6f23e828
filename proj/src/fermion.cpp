#include "qgt/fermion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgt::fermion {

void validate(const ModelParams& p) {
  require_finite(p);
  if (p.n_sites < 4) throw std::invalid_argument("N must be at least 4");
  if (p.n_sites % 2 != 0) throw std::invalid_argument("N must be even");
}

Dispersion dispersion(const ModelParams& p, double k) {
  const double delta = std::sin(2.0 * k) - (p.lambda_x - p.lambda_y) * std::sin(k);
  const double epsilon = std::cos(2.0 * k) - (p.lambda_x + p.lambda_y) * std::cos(k) - p.h;
  return {delta, epsilon, std::sqrt(delta * delta + epsilon * epsilon)};
}

BogoliubovAngle bogoliubov_angle(const ModelParams& p, double k) {
  const Dispersion d = dispersion(p, k);
  return {-0.5 * std::atan2(d.delta, d.epsilon), d.gap < kGapFloor};
}

AngleGradients angle_and_gap_gradients(const ModelParams& p, double k) {
  const Dispersion d = dispersion(p, k);
  AngleGradients g;
  g.near_critical = d.gap < kGapFloor;
  if (d.gap == 0.0) return g;
  const Vec3 gd = grad_delta(std::sin(k));
  const Vec3 ge = grad_epsilon(std::cos(k));
  const double gap_sq = d.gap * d.gap;
  for (std::size_t mu = 0; mu < 3; ++mu) {
    g.theta[mu] = -0.5 * (d.epsilon * gd[mu] - d.delta * ge[mu]) / gap_sq;
    g.gap[mu] = (d.epsilon * ge[mu] + d.delta * gd[mu]) / d.gap;
  }
  return g;
}

namespace {

BogoliubovRow make_row(const ModelParams& p, double k) {
  BogoliubovRow r;
  r.k = k;
  const Dispersion d = dispersion(p, k);
  r.delta = d.delta;
  r.epsilon = d.epsilon;
  r.gap = d.gap;
  r.theta = bogoliubov_angle(p, k).theta;
  r.grad_delta = grad_delta(std::sin(k));
  r.grad_epsilon = grad_epsilon(std::cos(k));
  const AngleGradients g = angle_and_gap_gradients(p, k);
  r.grad_theta = g.theta;
  r.grad_gap = g.gap;
  return r;
}

}  // namespace

BogoliubovTable::BogoliubovTable(const ModelParams& p, const KGrid& grid) {
  require_finite(p);
  rows_.reserve(grid.size());
  for (double k : grid.momenta()) rows_.push_back(make_row(p, k));
}

BogoliubovTable::BogoliubovTable(const QuenchSpec& q, const KGrid& grid) : has_chi_(true) {
  const ModelParams qp = q.quenched();
  require_finite(q.base);
  require_finite(qp);
  rows_.reserve(grid.size());
  for (double k : grid.momenta()) {
    BogoliubovRow r = make_row(qp, k);
    r.chi = bogoliubov_angle(q.base, k).theta - r.theta;
    rows_.push_back(r);
  }
}

double BogoliubovTable::min_gap() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& r : rows_) m = std::min(m, r.gap);
  return m;
}

namespace {

MetricTensor from_sums(const std::array<double, 6>& sums, int n_sites, Scaling scaling, double t) {
  MetricTensor g;
  const double s = scaling == Scaling::per_site ? 1.0 / n_sites : 1.0;
  for (std::size_t p = 0; p < simd::kPairs.size(); ++p) g.set(simd::kPairs[p][0], simd::kPairs[p][1], sums[p] * s);
  g.rescaled = scaling == Scaling::per_site;
  g.time = t;
  return g;
}

}  // namespace

std::vector<MetricPair> metric_series(const KGrid& grid, const QuenchSpec& q, std::span<const double> times,
                                      const EngineOptions& opt) {
  validate(q.base);
  const ModelParams qp = q.quenched();
  require_finite(qp);
  if (grid.n_sites() != q.base.n_sites) throw std::invalid_argument("k-grid and model disagree on N");
  for (double t : times)
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("times must be finite and nonnegative");

  std::vector<simd::MetricSums> sums(times.size());
  simd::metric_kernel(opt.isa)(grid, q.base.coords(), qp.coords(), times, sums);
  // No quench: chi_k = 0 and Dg vanishes identically; drop the rounding residue.
  if (q.trivial())
    for (auto& s : sums) s.dg.fill(0.0);

  std::vector<MetricPair> out;
  out.reserve(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    MetricPair m;
    m.g0 = from_sums(sums[i].g0, grid.n_sites(), opt.scaling, times[i]);
    m.dg = from_sums(sums[i].dg, grid.n_sites(), opt.scaling, times[i]);
    m.g0.min_gap = sums[i].min_gap;
    m.g0.near_critical = sums[i].min_gap < kGapFloor;
    m.dg.min_gap = std::min(sums[i].min_gap, sums[i].min_gap_quenched);
    m.dg.near_critical = m.dg.min_gap < kGapFloor;
    m.min_gap_quenched = sums[i].min_gap_quenched;
    out.push_back(m);
  }
  return out;
}

MetricTensor metric_t0(const ModelParams& p, const EngineOptions& opt) {
  validate(p);
  const KGrid grid(p.n_sites);
  const double t = 0.0;
  return metric_series(grid, QuenchSpec{p, {0.0, 0.0, 0.0}}, std::span<const double>(&t, 1), opt).front().g0;
}

MetricTensor metric_delta(const QuenchSpec& q, double t, const EngineOptions& opt) {
  validate(q.base);
  const KGrid grid(q.base.n_sites);
  return metric_series(grid, q, std::span<const double>(&t, 1), opt).front().dg;
}

MetricTensor metric_total(const QuenchSpec& q, double t, const EngineOptions& opt) {
  validate(q.base);
  const KGrid grid(q.base.n_sites);
  return metric_series(grid, q, std::span<const double>(&t, 1), opt).front().total();
}

namespace {

// Modulus squared of one (k, -k) block overlap <Omega(lambda + dl, t)|Omega(lambda, t)>.
double block_overlap_sq(const QuenchSpec& q, const Vec3& dl, double t, double k) {
  const ModelParams lam = q.base;
  const ModelParams lam_q = q.quenched();
  const ModelParams lam_d = lam.shifted(dl);
  const ModelParams lam_dq = lam_q.shifted(dl);

  const double gap = dispersion(lam_q, k).gap;        // Delta_k
  const double gap_d = dispersion(lam_dq, k).gap;     // Delta'_k
  const double th_q = bogoliubov_angle(lam_q, k).theta;
  const double th_dq = bogoliubov_angle(lam_dq, k).theta;
  const double chi = bogoliubov_angle(lam, k).theta - th_q;
  const double chi_d = bogoliubov_angle(lam_d, k).theta - th_dq;
  const double dth = th_dq - th_q;

  using C = std::complex<double>;
  const auto phase = [](double a) { return std::polar(1.0, a); };
  const C amp = std::cos(dth) * std::cos(chi_d) * std::cos(chi) +
                std::cos(dth) * phase(4.0 * t * (gap_d - gap)) * std::sin(chi_d) * std::sin(chi) +
                std::sin(dth) * phase(-4.0 * t * gap) * std::cos(chi_d) * std::sin(chi) -
                std::sin(dth) * phase(4.0 * t * gap_d) * std::sin(chi_d) * std::cos(chi);
  return std::norm(amp);
}

}  // namespace

double log_fidelity_sq(const QuenchSpec& q, const Vec3& dlambda, double t) {
  validate(q.base);
  const KGrid grid(q.base.n_sites);
  double s = 0.0;
  for (double k : grid.momenta()) s += std::log(block_overlap_sq(q, dlambda, t, k));
  return s;
}

double fidelity_sq(const QuenchSpec& q, const Vec3& dlambda, double t) {
  validate(q.base);
  const KGrid grid(q.base.n_sites);
  double f = 1.0;
  for (double k : grid.momenta()) f *= block_overlap_sq(q, dlambda, t, k);
  return f;
}

FidelityMetric metric_from_fidelity(const QuenchSpec& q, double t, double base_step, Scaling scaling) {
  validate(q.base);
  if (!(base_step > 0.0)) throw std::invalid_argument("stencil step must be positive");

  // u(d) = F^2(d) - 1, which vanishes at d = 0 with zero gradient.
  const auto u = [&](const Vec3& d) { return std::expm1(log_fidelity_sq(q, d, t)); };
  const auto along = [](const Vec3& v, double s) { return Vec3{v[0] * s, v[1] * s, v[2] * s}; };
  const auto stencil = [&](const Vec3& v, double h) {
    return (-u(along(v, 2.0 * h)) + 16.0 * u(along(v, h)) + 16.0 * u(along(v, -h)) - u(along(v, -2.0 * h))) /
           (12.0 * h * h);
  };
  const auto second = [&](const Vec3& v, double h) { return (16.0 * stencil(v, 0.5 * h) - stencil(v, h)) / 15.0; };

  // Keep the outermost stencil point inside the quadratic regime and above the
  // cancellation floor.
  FidelityMetric out;
  double h = base_step;
  for (int iter = 0; iter < 8; ++iter) {
    double largest = 0.0;
    for (Coord c : kCoords) {
      const Vec3 e = unit_vector(c);
      largest = std::max({largest, std::abs(u(along(e, 2.0 * h))), std::abs(u(along(e, -2.0 * h)))});
    }
    if (largest > 5e-2 && h > 1e-7) {
      h *= 0.1;
      out.step_adjusted = true;
    } else if (largest < 1e-9 && h < 1e-1) {
      h *= 10.0;
      out.step_adjusted = true;
    } else {
      break;
    }
  }
  out.step = h;

  double hess[3][3];
  for (int mu = 0; mu < 3; ++mu) hess[mu][mu] = second(unit_vector(static_cast<Coord>(mu)), h);
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = mu + 1; nu < 3; ++nu) {
      const Vec3 a = unit_vector(static_cast<Coord>(mu)), b = unit_vector(static_cast<Coord>(nu));
      const Vec3 plus{a[0] + b[0], a[1] + b[1], a[2] + b[2]};
      const Vec3 minus{a[0] - b[0], a[1] - b[1], a[2] - b[2]};
      hess[mu][nu] = hess[nu][mu] = 0.25 * (second(plus, h) - second(minus, h));
    }

  const double s = scaling == Scaling::per_site ? 1.0 / q.base.n_sites : 1.0;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = mu; nu < 3; ++nu) out.g.set(mu, nu, -0.5 * hess[mu][nu] * s);
  out.g.rescaled = scaling == Scaling::per_site;
  out.g.time = t;
  const KGrid grid(q.base.n_sites);
  const BogoliubovTable t0(q.base, grid), tq(q, grid);
  out.g.min_gap = std::min(t0.min_gap(), tq.min_gap());
  out.g.near_critical = out.g.min_gap < kGapFloor;
  return out;
}

PairAmplitudes evolved_amplitudes(const QuenchSpec& q, double t, double k) {
  const double chi = bogoliubov_angle(q.base, k).theta - bogoliubov_angle(q.quenched(), k).theta;
  const double gap_q = dispersion(q.quenched(), k).gap;
  using C = std::complex<double>;
  return {C(std::cos(chi), 0.0), C(0.0, 1.0) * std::polar(1.0, -4.0 * t * gap_q) * std::sin(chi)};
}

double log_dephased_purity(const QuenchSpec& q) {
  validate(q.base);
  const KGrid grid(q.base.n_sites);
  const BogoliubovTable table(q, grid);
  double s = 0.0;
  for (const auto& r : table.rows()) {
    const double s2 = std::sin(2.0 * r.chi);
    s += std::log1p(-0.5 * s2 * s2);
  }
  return s;
}

double dephased_purity(const QuenchSpec& q) { return std::exp(log_dephased_purity(q)); }

}  // namespace qgt::fermion
