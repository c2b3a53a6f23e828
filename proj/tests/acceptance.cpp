// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the number
// of failed criteria.

#include "qgt/dynamics.hpp"
#include "qgt/fermion.hpp"
#include "qgt/sweep.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

using namespace qgt;
using namespace qgt::dynamics;

namespace {

// Pinned tolerances and limits.
constexpr double kEquilibriumTol = 1e-8;
constexpr double kFidelityTol = 1e-5;
constexpr double kEdDynamicTol = 1e-6;
constexpr double kIdentityTol = 1e-6;
constexpr double kOtocSlack = 1e-9;
constexpr double kTriangleSlack = 1e-12;  // relative, for rounding in q0 + q1 +- 2 sqrt(q0 q1)
constexpr double kRidgeFraction = 0.99;
constexpr double kLinearityTol = 0.05;
constexpr double kPurityTol = 1e-8;
constexpr double kSectorGap = 1e-3;

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(const char* name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = s < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("%s %s: %s [%.1f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", name, o.detail.c_str(), s, limit_s,
              in_time ? "" : ", over time");
  std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool even_sector(const QuenchSpec& q, const ed::SpectralDecomposition& s0) {
  if (s0.gap() < kSectorGap || ed::parity_expectation(ed::Vector(s0.states().col(0))) < 0.5) return false;
  const fermion::KGrid grid(q.base.n_sites);
  return fermion::BogoliubovTable(q.base, grid).min_gap() >= kSectorGap &&
         fermion::BogoliubovTable(q, grid).min_gap() >= kSectorGap;
}

Outcome equilibrium_oracle() {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  double worst = 0.0;
  int checked = 0;
  for (int n : {4, 6, 8}) {
    int matched = 0;
    while (matched < 20) {
      const ModelParams p{u(rng), u(rng), u(rng), n};
      const QuenchSpec q{p, {0, 0, 0}};
      if (!even_sector(q, ed::SpectralDecomposition(ed::build_hamiltonian(p)))) continue;
      ++matched;
      worst = std::max(worst, ed::real_part(ed::qgt_spectral(p), n).relative_diff(fermion::metric_t0(p)));
    }
    checked += matched;
  }
  return {worst < kEquilibriumTol, fmt("%d points at N = 4, 6, 8, max relative deviation %.3g (tol %.0e)", checked,
                                       worst, kEquilibriumTol)};
}

Outcome dynamic_oracle() {
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> u(-1.5, 1.5), du(-0.5, 0.5), tu(0.0, 4.0);
  const int sizes[] = {8, 50, 500};
  double worst_fid = 0.0;
  for (int i = 0; i < 20;) {
    const QuenchSpec q{{u(rng), u(rng), u(rng), sizes[i % 3]}, {du(rng), du(rng), du(rng)}};
    const fermion::KGrid grid(q.base.n_sites);
    if (fermion::BogoliubovTable(q.base, grid).min_gap() < 1e-2 || fermion::BogoliubovTable(q, grid).min_gap() < 1e-2)
      continue;
    const double t = tu(rng);
    const MetricTensor closed = fermion::metric_t0(q.base) + fermion::metric_delta(q, t);
    worst_fid = std::max(worst_fid, fermion::metric_from_fidelity(q, t).g.relative_diff(closed));
    ++i;
  }

  double worst_ed = 0.0;
  int matched = 0;
  while (matched < 20) {
    const QuenchSpec q{{u(rng), u(rng), u(rng), 8}, {du(rng), du(rng), du(rng)}};
    if (!even_sector(q, ed::SpectralDecomposition(ed::build_hamiltonian(q.base)))) continue;
    ++matched;
    const ed::QuenchSystem s(q);
    const double t = tu(rng);
    worst_ed = std::max(worst_ed, ed::real_part(s.qgt_quench(t), 8).relative_diff(fermion::metric_total(q, t)));
  }
  return {worst_fid < kFidelityTol && worst_ed < kEdDynamicTol,
          fmt("closed form vs fidelity: 20 points, max %.3g (tol %.0e); vs ED at N = 8: %d points, max %.3g (tol %.0e)",
              worst_fid, kFidelityTol, matched, worst_ed, kEdDynamicTol)};
}

Outcome identity_suite() {
  std::mt19937_64 rng(303);
  std::uniform_real_distribution<double> u(-1.5, 1.5), du(-0.5, 0.5);
  std::vector<QuenchSpec> cases{{{0.5, 0.3, 0.2, 6}, {0, 0, 0.2}}};
  while (cases.size() < 4) {
    const QuenchSpec q{{u(rng), u(rng), u(rng), 6}, {du(rng), du(rng), du(rng)}};
    if (ed::SpectralDecomposition(ed::build_hamiltonian(q.base)).gap() >= kSectorGap) cases.push_back(q);
  }
  double worst = 0.0;
  int evaluated = 0;
  for (const auto& q : cases) {
    const ed::QuenchSystem s(q);
    for (int i = 1; i <= 20; ++i) {
      const double t = 0.25 * i;
      for (Coord mu : kCoords) {
        const double a = s.q1_spectral(mu, t), b = s.q1_variance(mu, t), c = s.q1_gcor(mu, t);
        const double scale = std::max(1.0, std::abs(a));
        worst = std::max({worst, std::abs(a - b) / scale, std::abs(a - c) / scale});
        ++evaluated;
      }
    }
  }
  return {worst < kIdentityTol, fmt("%d (instance, t, direction) triples at N = 6, max deviation %.3g (tol %.0e)",
                                    evaluated, worst, kIdentityTol)};
}

Outcome bound_suite() {
  int samples = 0, violations = 0;

  // Triangle bounds on 20 random instances, dense grid.
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> u(-1.5, 1.5), du(-0.5, 0.5);
  int instances = 0;
  while (instances < 20) {
    const QuenchSpec q{{u(rng), u(rng), u(rng), 6}, {du(rng), du(rng), du(rng)}};
    if (ed::SpectralDecomposition(ed::build_hamiltonian(q.base)).gap() < kSectorGap) continue;
    ++instances;
    const ed::QuenchSystem s(q);
    for (Coord mu : kCoords) {
      const double q0 = s.q_general(mu, 0.0);
      for (int i = 0; i <= 100; ++i) {
        const double t = 0.05 * i, q1 = s.q1_spectral(mu, t), qt = s.q_general(mu, t);
        const double cross = 2.0 * std::sqrt(q0 * q1);
        const double slack = kTriangleSlack * (q0 + q1 + cross) + kTriangleSlack;
        ++samples;
        if (q0 + q1 - cross > qt + slack || qt > q0 + q1 + cross + slack) ++violations;
      }
    }
  }
  const int triangle_v = violations;

  // OTOC bound.
  const ed::QuenchSystem otoc(QuenchSpec{{0.5, 0.3, 0.2, 6}, {0, 0, 0.2}});
  for (int i = 0; i <= 40; ++i)
    for (Coord mu : kCoords) {
      const auto c = otoc_bound_check(otoc, mu, 0.1 * i);
      ++samples;
      if (c.lhs > c.rhs + kOtocSlack) ++violations;
    }
  const int otoc_v = violations - triangle_v;

  // |X| <= t^2 ||dH^q||^4 purity on the symmetry-broken instance, default grid.
  const ed::QuenchSystem broken(QuenchSpec{{0.5, 0.3, 0.0, 8}, {0, 0, 0.2}}, symmetry_breaking_field(8));
  const auto times = default_time_grid(slowest_quench_gap(broken));
  const auto r = equilibration_report(broken, Coord::h, times);
  double worst_ratio = 0.0;
  for (std::size_t i = 0; i < r.t.size(); ++i) {
    ++samples;
    if (std::abs(r.x[i]) > r.x_bound[i]) ++violations;
    if (r.x_bound[i] > 0) worst_ratio = std::max(worst_ratio, std::abs(r.x[i]) / r.x_bound[i]);
  }
  const int x_v = violations - triangle_v - otoc_v;
  return {violations == 0,
          fmt("%d samples; violations: triangle %d, OTOC %d, X bound %d (max |X|/bound %.3g on [0, %.1f], "
              "non_resonant=%d)",
              samples, triangle_v, otoc_v, x_v, worst_ratio, times.back(), int(r.non_resonant))};
}

Outcome ridge_conservation() {
  sweep::SweepConfig c;
  c.engine = sweep::Engine::analytic;
  c.n_sites = 500;
  c.lambda_x = {-2.0, 2.0, 201};
  c.lambda_y = {-2.0, 2.0, 201};
  c.h = 0.0;
  c.offset = {0.0, 0.0, 0.2};
  c.times = {0.0, 1.0, 2.0, 5.0};
  const auto rows = sweep::run_phase_scan(c);
  const auto r0 = sweep::ridge_argmax(rows, c, 0.0);

  // Informational: is the t > 0 argmax on some t = 0 ridge (a local maximum
  // along lambda_y within one cell)?
  const auto ys = c.lambda_y.values();
  std::vector<std::vector<double>> s0(201, std::vector<double>(201));
  for (const auto& row : rows)
    if (row.t == 0.0)
      s0[static_cast<std::size_t>(std::lround((row.lambda_x + 2.0) / 0.02))]
        [static_cast<std::size_t>(std::lround((row.lambda_y + 2.0) / 0.02))] = row.log10_norm;
  const auto on_ridge = [&](std::size_t col, int j) {
    for (int k = std::max(0, j - 1); k <= std::min(200, j + 1); ++k) {
      const auto& v = s0[col];
      const double left = k > 0 ? v[k - 1] : -INFINITY, right = k < 200 ? v[k + 1] : -INFINITY;
      if (v[k] >= left && v[k] >= right) return true;
    }
    return false;
  };

  bool pass = true;
  std::string detail = "columns with the same argmax within one cell:";
  for (double t : {1.0, 2.0, 5.0}) {
    const auto rt = sweep::ridge_argmax(rows, c, t);
    const double frac = sweep::ridge_agreement(r0, rt, 1);
    int ridge = 0;
    for (std::size_t col = 0; col < rt.size(); ++col) ridge += rt[col] >= 0 && on_ridge(col, rt[col]);
    pass = pass && frac >= kRidgeFraction;
    detail += fmt(" t=%g %.1f%% (on a t=0 ridge %.1f%%);", t, 100.0 * frac, 100.0 * ridge / double(rt.size()));
  }
  detail += fmt(" need %.0f%%", 100.0 * kRidgeFraction);
  return {pass, detail};
}

Outcome purity_scaling() {
  const int sizes[] = {8, 16, 32, 64};
  double logp[4], n[4];
  bool decreasing = true;
  for (int i = 0; i < 4; ++i) {
    const QuenchSpec q{{0.5, 0.3, 0.0, sizes[i]}, {0, 0, 0.2}};
    logp[i] = fermion::log_dephased_purity(q);
    n[i] = sizes[i];
    if (i > 0 && !(fermion::dephased_purity(q) < std::exp(logp[i - 1]))) decreasing = false;
  }
  // Least-squares line through (N, log purity); every point within 5% of it.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < 4; ++i) {
    sx += n[i];
    sy += logp[i];
    sxx += n[i] * n[i];
    sxy += n[i] * logp[i];
  }
  const double slope = (4 * sxy - sx * sy) / (4 * sxx - sx * sx), icpt = (sy - slope * sx) / 4;
  double worst = 0.0;
  std::string per;
  for (int i = 0; i < 4; ++i) {
    const double rel = std::abs(logp[i] - (icpt + slope * n[i])) / std::abs(logp[i]);
    worst = std::max(worst, rel);
    per += fmt("%s%.1f%%", i ? "/" : "", 100.0 * rel);
  }
  return {decreasing && worst <= kLinearityTol,
          fmt("quench (0.5, 0.3, 0) -> dh 0.2: decreasing=%d, log purity %.4g/%.4g/%.4g/%.4g at N = 8/16/32/64, "
              "fit slope %.4g, residuals %s (tol %.0f%%)",
              int(decreasing), logp[0], logp[1], logp[2], logp[3], slope, per.c_str(), 100.0 * kLinearityTol)};
}

Outcome purity_crosscheck() {
  const QuenchSpec q{{0.5, 0.3, 0.0, 8}, {0, 0, 0.2}};
  const ed::QuenchSystem s(q);
  double sum4 = 0.0;
  for (double c : s.quench_coefficients()) sum4 += c * c * c * c;
  const double engine = fermion::dephased_purity(q);
  const double diff = std::abs(engine - sum4);
  return {diff < kPurityTol && s.ground_parity() > 0.5,
          fmt("engine %.15g, ED sum |c_n|^4 %.15g, difference %.3g (tol %.0e)", engine, sum4, diff, kPurityTol)};
}

}  // namespace

int main() {
  run("oracle-equivalence-equilibrium", 60, equilibrium_oracle);
  run("oracle-equivalence-dynamic", 300, dynamic_oracle);
  run("identity-suite", 120, identity_suite);
  run("bound-suite", 600, bound_suite);
  run("phase-diagram-conservation", 600, ridge_conservation);
  run("equilibration-scaling", 60, purity_scaling);
  run("purity-crosscheck", 60, purity_crosscheck);
  return failures;
}
