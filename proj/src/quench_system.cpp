#include "qgt/quench_system.hpp"

#include <cmath>

namespace qgt::ed {

std::complex<double> phase_integral(double w, double t) {
  if (std::abs(w) < kDegeneracyTol) return {t, 0.0};
  // (e^{i w t} - 1) / (i w), written without the cancellation in cos - 1.
  const double s = std::sin(0.5 * w * t);
  return {std::sin(w * t) / w, 2.0 * s * s / w};
}

namespace {

Matrix with_field(Matrix h, const Vector& field) {
  if (field.size() == 0) return h;
  if ((Eigen::Index{1} << field.size()) != h.rows()) throw std::invalid_argument("z field needs one entry per site");
  h += z_field_operator(field);
  return h;
}

// Real matrix times complex vector without promoting the matrix.
CVector mul(const Matrix& m, const CVector& v) {
  const Vector re = m * v.real(), im = m * v.imag();
  CVector out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

CVector mul_transposed(const Matrix& m, const CVector& v) {
  const Vector re = m.transpose() * v.real(), im = m.transpose() * v.imag();
  CVector out(re.size());
  out.real() = re;
  out.imag() = im;
  return out;
}

}  // namespace

QuenchSystem::QuenchSystem(const QuenchSpec& quench, Vector z_field)
    : spec_(quench),
      field_(std::move(z_field)),
      h_(with_field(build_hamiltonian(quench.base), field_)),
      hq_(with_field(build_hamiltonian(quench.quenched()), field_)),
      initial_(h_),
      post_(hq_) {
  psi0_ = initial_.ground_state();
  coeff_ = post_.states().transpose() * psi0_;
  for (Coord mu : kCoords) {
    const auto i = static_cast<std::size_t>(index(mu));
    dh_[i] = derivative_operator(mu, n_sites());
    dhq_[i] = post_.to_eigenbasis(dh_[i]);
  }
}

std::vector<Matrix> QuenchSystem::local_hamiltonians() const {
  std::vector<Matrix> out;
  const auto terms = local_terms(spec_.base);
  for (int i = 0; i < n_sites(); ++i) {
    Matrix m = to_matrix(terms[static_cast<std::size_t>(i)], n_sites());
    if (field_.size() != 0) PauliString::on_sites(n_sites(), {{i, 'Z'}}, field_[i]).accumulate(m);
    out.push_back(std::move(m));
  }
  return out;
}

CVector QuenchSystem::evolve(const CVector& state, double t) const {
  CVector c = mul_transposed(post_.states(), state);
  for (Eigen::Index n = 0; n < c.size(); ++n) c[n] *= std::polar(1.0, -t * post_.energies()[n]);
  return mul(post_.states(), c);
}

CMatrix QuenchSystem::d_tilde(const Matrix& a, double t) const {
  const Vector& e = post_.energies();
  const Eigen::Index d = e.size();
  CMatrix out(d, d);
  for (Eigen::Index n = 0; n < d; ++n)
    for (Eigen::Index m = 0; m < d; ++m) out(m, n) = a(m, n) * phase_integral(e[m] - e[n], t);
  return out;
}

CMatrix QuenchSystem::d_operator(Coord mu, double t) const {
  const CMatrix v = post_.states().cast<std::complex<double>>();
  return v * d_tilde(derivative_quench_basis(mu), t) * v.transpose();
}

CMatrix QuenchSystem::local_d_operator(Coord mu, int site, double t) const {
  const CMatrix v = post_.states().cast<std::complex<double>>();
  return v * d_tilde(post_.to_eigenbasis(local_derivative_operator(mu, site, n_sites())), t) * v.transpose();
}

CVector QuenchSystem::apply_quench_basis(const CMatrix& op, const CVector& v) const {
  return mul(post_.states(), op * mul_transposed(post_.states(), v));
}

CVector QuenchSystem::d_on_ground(Coord mu, double t) const {
  return apply_quench_basis(d_tilde(derivative_quench_basis(mu), t), psi0_.cast<std::complex<double>>());
}

// Amplitudes <n|X|0> / (E_0 - E_n) in the H(lambda) eigenbasis for
// X = dH + [H, iD] (include_static) or X = [H, iD]; the ground level is zeroed.
std::array<CVector, 3> QuenchSystem::xi_amplitudes(double t, bool include_static) const {
  using C = std::complex<double>;
  const CVector psi = psi0_.cast<C>();
  const CVector h_psi = mul(h_, psi);
  const Vector& e = initial_.energies();
  const Eigen::Index ground_end = initial_.blocks().front().second;

  std::array<CVector, 3> out;
  for (Coord mu : kCoords) {
    const auto i = static_cast<std::size_t>(index(mu));
    const CMatrix dt = d_tilde(dhq_[i], t);
    // [H, iD] psi = i (H D psi - D H psi)
    const CVector d_psi = apply_quench_basis(dt, psi);
    CVector x = C(0.0, 1.0) * (mul(h_, d_psi) - apply_quench_basis(dt, h_psi));
    if (include_static) x += mul(dh_[i], psi);
    CVector a = mul_transposed(initial_.states(), x);
    for (Eigen::Index n = 0; n < a.size(); ++n) a[n] = n < ground_end ? C(0.0) : a[n] / (e[0] - e[n]);
    out[i] = std::move(a);
  }
  return out;
}

Eigen::Matrix3cd QuenchSystem::qgt_quench(double t) const {
  const auto a = xi_amplitudes(t, true);
  Eigen::Matrix3cd q;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) q(mu, nu) = a[static_cast<std::size_t>(mu)].dot(a[static_cast<std::size_t>(nu)]);
  return q;
}

double QuenchSystem::q_general(Coord mu, double t) const {
  return xi_amplitudes(t, true)[static_cast<std::size_t>(index(mu))].squaredNorm();
}

double QuenchSystem::q1_spectral(Coord mu, double t) const {
  return xi_amplitudes(t, false)[static_cast<std::size_t>(index(mu))].squaredNorm();
}

double QuenchSystem::q1_variance(Coord mu, double t) const {
  const CVector d_psi = d_on_ground(mu, t);
  const std::complex<double> mean = psi0_.cast<std::complex<double>>().dot(d_psi);
  return d_psi.squaredNorm() - std::norm(mean);
}

std::vector<double> QuenchSystem::connected_corr_profile(Coord mu, double t) const {
  if (!translation_invariant()) throw std::logic_error("correlator route needs a translation-invariant chain");
  const CVector psi = psi0_.cast<std::complex<double>>();
  std::vector<CVector> dj;
  std::vector<std::complex<double>> mean;
  for (int j = 0; j < n_sites(); ++j) {
    const CMatrix dt = d_tilde(post_.to_eigenbasis(local_derivative_operator(mu, j, n_sites())), t);
    dj.push_back(apply_quench_basis(dt, psi));
    mean.push_back(psi.dot(dj.back()));
  }
  std::vector<double> out;
  for (int j = 0; j < n_sites(); ++j)
    out.push_back((dj[0].dot(dj[static_cast<std::size_t>(j)]) - std::conj(mean[0]) * mean[static_cast<std::size_t>(j)]).real());
  return out;
}

double QuenchSystem::connected_corr_integral(Coord mu, double t) const {
  double s = 0.0;
  for (double v : connected_corr_profile(mu, t)) s += v;
  return s;
}

double QuenchSystem::q1_gcor(Coord mu, double t) const { return n_sites() * connected_corr_integral(mu, t); }

double QuenchSystem::dephased_purity() const {
  double p = 0.0;
  for (auto [first, last] : post_.blocks()) {
    const double w = coeff_.segment(first, last - first).squaredNorm();
    p += w * w;
  }
  return p;
}

}  // namespace qgt::ed
