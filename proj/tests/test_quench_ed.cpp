#include <doctest.h>

#include "qgt/fermion.hpp"
#include "qgt/quench_system.hpp"

#include <cmath>
#include <random>

using namespace qgt;
using namespace qgt::ed;

namespace {

ModelParams point(double lx, double ly, double h, int n) { return {lx, ly, h, n}; }

double max_abs(const CMatrix& m) { return m.cwiseAbs().maxCoeff(); }

/// U^dag(t) A U(t) by explicit exponentials, as an independent check of D.
CMatrix heisenberg(const QuenchSystem& s, const Matrix& a, double t) {
  const Matrix& v = s.quench_spectrum().states();
  const Vector& e = s.quench_spectrum().energies();
  CVector ph(e.size());
  for (Eigen::Index i = 0; i < e.size(); ++i) ph[i] = std::polar(1.0, -t * e[i]);
  const CMatrix u = v.cast<std::complex<double>>() * ph.asDiagonal() * v.transpose().cast<std::complex<double>>();
  return u.adjoint() * a.cast<std::complex<double>>() * u;
}

}  // namespace

TEST_CASE("evolution in the quench eigenbasis") {
  const QuenchSystem s({point(0.5, 0.3, 0.2, 6), {0, 0, 0.3}});
  const CVector psi = s.ground_state().cast<std::complex<double>>();
  CHECK((s.evolve(psi, 0.0) - psi).cwiseAbs().maxCoeff() < 1e-14);

  const CMatrix hq = s.quench_hamiltonian().cast<std::complex<double>>();
  const std::complex<double> e0 = psi.dot(hq * psi);
  for (double t : {0.3, 2.0, 11.0}) {
    const CVector pt = s.evolve(psi, t);
    CHECK(std::abs(pt.norm() - 1.0) < 1e-12);
    CHECK(std::abs(pt.dot(hq * pt) - e0) < 1e-12);
  }

  const CVector eig = s.quench_spectrum().states().col(5).cast<std::complex<double>>();
  const CVector et = s.evolve(eig, 1.7);
  CHECK(std::abs(std::abs(eig.dot(et)) - 1.0) < 1e-12);
  CHECK(std::abs(eig.dot(et) - std::polar(1.0, -1.7 * s.quench_spectrum().energies()[5])) < 1e-12);
}

TEST_CASE("D operator") {
  const QuenchSystem s({point(0.5, 0.3, 0.2, 6), {0.1, 0, 0.2}});
  for (Coord mu : kCoords) {
    CHECK(max_abs(s.d_operator(mu, 0.0)) == 0.0);
    for (double t : {0.5, 3.0}) {
      const CMatrix d = s.d_operator(mu, t);
      CHECK(max_abs(d - d.adjoint()) < 1e-12);
    }
    const double t0 = 1.3, h = 1e-5;
    const CMatrix deriv = (s.d_operator(mu, t0 + h) - s.d_operator(mu, t0 - h)) / (2 * h);
    CHECK(max_abs(deriv - heisenberg(s, s.derivative(mu), t0)) < 1e-6);
  }
  CHECK(phase_integral(0.0, 2.5) == std::complex<double>(2.5, 0.0));
  CHECK(std::abs(phase_integral(1e-6, 2.5) - std::complex<double>(2.5, 0.0)) < 1e-5);
}

TEST_CASE("q(t) at t = 0 is the equilibrium QGT") {
  const ModelParams p = point(0.5, 0.3, 0.2, 6);
  const QuenchSystem s({p, {0, 0, 0.2}});
  const Eigen::Matrix3cd q0 = qgt_spectral(p);
  for (Coord mu : kCoords) {
    CHECK(std::abs(s.q_general(mu, 0.0) - q0(index(mu), index(mu)).real()) < 1e-10);
    CHECK(s.q1_spectral(mu, 0.0) == 0.0);
    CHECK(std::abs(s.q1_variance(mu, 0.0)) < 1e-15);
  }
  CHECK((s.qgt_quench(0.0) - q0).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("three routes to q1") {
  const QuenchSystem s({point(0.5, 0.3, 0.2, 6), {0, 0, 0.2}});
  for (int i = 0; i < 20; ++i) {
    const double t = 0.25 * (i + 1);
    for (Coord mu : kCoords) {
      const double a = s.q1_spectral(mu, t), b = s.q1_variance(mu, t), c = s.q1_gcor(mu, t);
      CHECK(a >= 0.0);
      CHECK(std::abs(a - b) < 1e-10 * std::max(1.0, a));
      CHECK(std::abs(a - c) < 1e-10 * std::max(1.0, a));
    }
  }
}

TEST_CASE("correlator double integral by quadrature") {
  // Composite Simpson over both times of <dH_0(t') dH_j(t'')>_C, summed over j.
  const QuenchSystem s({point(0.5, 0.3, 0.2, 4), {0, 0, 0.2}});
  const Coord mu = Coord::h;
  const double t = 1.0;
  const int panels = 1000;
  const Matrix& v = s.quench_spectrum().states();
  const Vector& e = s.quench_spectrum().energies();
  const Vector& c = s.quench_coefficients();
  const int n = s.n_sites();

  Matrix sum_a = Matrix::Zero(v.rows(), v.cols());
  for (int j = 0; j < n; ++j) sum_a += local_derivative_operator(mu, j, n);
  const Matrix a0 = s.quench_spectrum().to_eigenbasis(local_derivative_operator(mu, 0, n));
  const Matrix aj = s.quench_spectrum().to_eigenbasis(sum_a);

  // A(t) psi_0 in the eigenbasis, and <A(t)>.
  const auto heis = [&](const Matrix& a, double tau) {
    CVector x(c.size());
    for (Eigen::Index m = 0; m < c.size(); ++m) x[m] = std::polar(c[m], -tau * e[m]);
    CVector y = a.cast<std::complex<double>>() * x;
    for (Eigen::Index m = 0; m < c.size(); ++m) y[m] *= std::polar(1.0, tau * e[m]);
    return y;
  };
  CMatrix va(c.size(), panels + 1), vb(c.size(), panels + 1);
  std::vector<std::complex<double>> ma(panels + 1), mb(panels + 1);
  Vector w(panels + 1);
  const CVector c0 = c.cast<std::complex<double>>();
  for (int i = 0; i <= panels; ++i) {
    const double tau = t * i / panels;
    va.col(i) = heis(a0, tau);
    vb.col(i) = heis(aj, tau);
    ma[i] = c0.dot(va.col(i));
    mb[i] = c0.dot(vb.col(i));
    w[i] = (i == 0 || i == panels) ? 1.0 : (i % 2 ? 4.0 : 2.0);
  }
  w *= t / (3.0 * panels);
  const CMatrix gram = va.adjoint() * vb;
  std::complex<double> total = 0.0;
  for (int i = 0; i <= panels; ++i)
    for (int j = 0; j <= panels; ++j) total += w[i] * w[j] * (gram(i, j) - std::conj(ma[i]) * mb[j]);

  CHECK(std::abs(total.real() - s.connected_corr_integral(mu, t)) < 1e-6);
  CHECK(std::abs(n * total.real() - s.q1_variance(mu, t)) < 1e-6 * n);
}

TEST_CASE("truncated correlator sums stay inside an exponential envelope") {
  const QuenchSystem s({point(0.5, 0.3, 0.2, 8), {0, 0, 0.2}});
  const auto prof = s.connected_corr_profile(Coord::h, 0.3);
  REQUIRE(prof.size() == 8);
  double full = 0.0, mass = 0.0;
  for (double v : prof) {
    full += v;
    mass += std::abs(v);
  }
  // chi = 2 v / Delta with v = 4 (four times the local term norm), a = 1.
  const double chi = 2.0 * 4.0 / s.quench_spectrum().gap();
  for (int d = 0; d <= 4; ++d) {
    double part = 0.0;
    for (int j = 0; j < 8; ++j)
      if (std::min(j, 8 - j) <= d) part += prof[j];
    CHECK(std::abs(full - part) <= mass * std::exp(-d / (chi + 1.0)));
    if (d == 4) CHECK(std::abs(full - part) < 1e-14);
  }
  for (int j = 1; j < 8; ++j) CHECK(prof[j] == doctest::Approx(prof[8 - j]).epsilon(1e-9));
}

TEST_CASE("triangle bounds") {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1.5, 1.5), du(-0.5, 0.5);
  int instances = 0;
  while (instances < 5) {
    const QuenchSpec q{point(u(rng), u(rng), u(rng), 6), {du(rng), du(rng), du(rng)}};
    if (SpectralDecomposition(build_hamiltonian(q.base)).gap() < 1e-3) continue;
    ++instances;
    const QuenchSystem s(q);
    for (Coord mu : kCoords) {
      const double q0 = s.q_general(mu, 0.0);
      for (int i = 0; i <= 40; ++i) {
        const double t = 0.1 * i;
        const double q1 = s.q1_spectral(mu, t), qt = s.q_general(mu, t);
        const double cross = 2.0 * std::sqrt(q0 * q1);
        CHECK(q0 + q1 - cross <= qt * (1 + 1e-12) + 1e-12);
        CHECK(qt <= (q0 + q1 + cross) * (1 + 1e-12) + 1e-12);
      }
    }
  }
}

TEST_CASE("quenched QGT matches the closed form in the even sector") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1.5, 1.5), du(-0.5, 0.5), tu(0.0, 4.0);
  int matched = 0;
  for (int tries = 0; tries < 200 && matched < 8; ++tries) {
    const QuenchSpec q{point(u(rng), u(rng), u(rng), 8), {du(rng), du(rng), du(rng)}};
    const SpectralDecomposition s0(build_hamiltonian(q.base));
    if (s0.gap() < 1e-3 || parity_expectation(Vector(s0.states().col(0))) < 0.5) continue;
    const fermion::KGrid grid(8);
    if (fermion::BogoliubovTable(q.base, grid).min_gap() < 1e-3 || fermion::BogoliubovTable(q, grid).min_gap() < 1e-3)
      continue;
    ++matched;
    const QuenchSystem s(q);
    for (double t : {tu(rng), tu(rng)}) {
      const MetricTensor ed = real_part(s.qgt_quench(t), 8);
      const MetricTensor ff = fermion::metric_total(q, t);
      INFO("t = " << t << " ed " << to_string(ed) << " ff " << to_string(ff));
      CHECK(ed.relative_diff(ff) < 1e-6);
    }
  }
  CHECK(matched == 8);
}

TEST_CASE("dephased purity") {
  const QuenchSystem triv({point(0.5, 0.3, 0.0, 8), {0, 0, 0}});
  CHECK(triv.dephased_purity() == doctest::Approx(1.0).epsilon(1e-12));

  const QuenchSpec q{point(0.5, 0.3, 0.0, 8), {0, 0, 0.2}};
  const QuenchSystem s(q);
  REQUIRE(s.ground_parity() > 0.5);
  CHECK(std::abs(s.dephased_purity() - fermion::dephased_purity(q)) < 1e-8);

  // Non-degenerate reference: sum_n |c_n|^4.
  double sum4 = 0.0;
  for (double c : s.quench_coefficients()) sum4 += c * c * c * c;
  CHECK(s.dephased_purity() >= sum4 - 1e-15);
}
