#include "qgt/ed.hpp"

#include <Eigen/Eigenvalues>

#include <bit>
#include <cmath>

namespace qgt::ed {

void check_sites(int n_sites) {
  if (n_sites < kMinSites || n_sites > kMaxSites)
    throw std::invalid_argument("exact diagonalization needs " + std::to_string(kMinSites) + " <= N <= " +
                                std::to_string(kMaxSites) + ", got N = " + std::to_string(n_sites));
}

PauliString::PauliString(std::string ops, double coefficient) : ops_(std::move(ops)), coefficient_(coefficient) {
  if (ops_.empty() || ops_.size() > 31) throw std::invalid_argument("Pauli string length must be 1..31");
  if (!std::isfinite(coefficient_)) throw std::invalid_argument("Pauli string coefficient must be finite");
  for (std::size_t i = 0; i < ops_.size(); ++i) {
    const std::uint32_t bit = 1u << i;
    switch (ops_[i]) {
      case 'I': break;
      case 'X': x_ |= bit; break;
      case 'Y': y_ |= bit; break;
      case 'Z': z_ |= bit; break;
      default: throw std::invalid_argument(std::string("unknown Pauli symbol '") + ops_[i] + "'");
    }
  }
}

PauliString PauliString::on_sites(int n_sites, std::initializer_list<std::pair<int, char>> ops, double coefficient) {
  std::string s(static_cast<std::size_t>(n_sites), 'I');
  for (auto [site, sym] : ops) {
    const int i = ((site % n_sites) + n_sites) % n_sites;
    if (s[static_cast<std::size_t>(i)] != 'I') throw std::invalid_argument("two Pauli factors on one site");
    s[static_cast<std::size_t>(i)] = sym;
  }
  return PauliString(std::move(s), coefficient);
}

std::vector<int> PauliString::support() const {
  std::vector<int> out;
  for (int i = 0; i < n_sites(); ++i)
    if (ops_[static_cast<std::size_t>(i)] != 'I') out.push_back(i);
  return out;
}

int PauliString::y_count() const { return std::popcount(y_); }

std::complex<double> PauliString::amplitude(std::uint32_t s) const {
  // Y = i X Z on each site.
  static const std::complex<double> ipow[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  const double sign = (std::popcount(s & sign_mask()) & 1) ? -1.0 : 1.0;
  return ipow[y_count() & 3] * sign;
}

void PauliString::accumulate(Matrix& m) const {
  if (y_count() % 2 != 0) throw std::invalid_argument("odd number of Y factors gives a non-real operator");
  const double phase = (y_count() % 4 == 2) ? -1.0 : 1.0;
  const std::uint32_t dim = 1u << n_sites();
  const std::uint32_t flip = flip_mask(), sm = sign_mask();
  for (std::uint32_t s = 0; s < dim; ++s) {
    const double sign = (std::popcount(s & sm) & 1) ? -1.0 : 1.0;
    m(s ^ flip, s) += coefficient_ * phase * sign;
  }
}

Matrix PauliString::matrix() const {
  const Eigen::Index dim = Eigen::Index{1} << n_sites();
  Matrix m = Matrix::Zero(dim, dim);
  accumulate(m);
  return m;
}

Matrix to_matrix(const PauliSum& terms, int n_sites) {
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Matrix m = Matrix::Zero(dim, dim);
  for (const auto& t : terms) {
    if (t.n_sites() != n_sites) throw std::invalid_argument("Pauli string length differs from N");
    t.accumulate(m);
  }
  return m;
}

std::vector<PauliSum> local_terms(const ModelParams& p) {
  check_sites(p.n_sites);
  require_finite(p);
  const int n = p.n_sites;
  std::vector<PauliSum> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto& t = out[static_cast<std::size_t>(i)];
    t.push_back(PauliString::on_sites(n, {{i - 1, 'X'}, {i, 'Z'}, {i + 1, 'X'}}, -1.0));
    t.push_back(PauliString::on_sites(n, {{i, 'Z'}}, -p.h));
    t.push_back(PauliString::on_sites(n, {{i, 'Y'}, {i + 1, 'Y'}}, p.lambda_y));
    t.push_back(PauliString::on_sites(n, {{i, 'X'}, {i + 1, 'X'}}, p.lambda_x));
  }
  return out;
}

PauliString derivative_term(Coord mu, int site, int n_sites) {
  switch (mu) {
    case Coord::lambda_x: return PauliString::on_sites(n_sites, {{site, 'X'}, {site + 1, 'X'}});
    case Coord::lambda_y: return PauliString::on_sites(n_sites, {{site, 'Y'}, {site + 1, 'Y'}});
    case Coord::h: return PauliString::on_sites(n_sites, {{site, 'Z'}}, -1.0);
  }
  throw std::invalid_argument("bad coordinate");
}

Matrix build_hamiltonian(const ModelParams& p) {
  const Eigen::Index dim = Eigen::Index{1} << p.n_sites;
  Matrix h = Matrix::Zero(dim, dim);
  for (const auto& local : local_terms(p))
    for (const auto& t : local) t.accumulate(h);
  return h;
}

Matrix derivative_operator(Coord mu, int n_sites) {
  check_sites(n_sites);
  const Eigen::Index dim = Eigen::Index{1} << n_sites;
  Matrix m = Matrix::Zero(dim, dim);
  for (int j = 0; j < n_sites; ++j) derivative_term(mu, j, n_sites).accumulate(m);
  return m;
}

Matrix local_derivative_operator(Coord mu, int site, int n_sites) {
  check_sites(n_sites);
  return derivative_term(mu, site, n_sites).matrix();
}

Matrix z_field_operator(const Vector& field) {
  const int n = static_cast<int>(field.size());
  check_sites(n);
  const Eigen::Index dim = Eigen::Index{1} << n;
  Matrix m = Matrix::Zero(dim, dim);
  for (int i = 0; i < n; ++i) PauliString::on_sites(n, {{i, 'Z'}}, field[i]).accumulate(m);
  return m;
}

Matrix translation_operator(int n_sites) {
  check_sites(n_sites);
  const std::uint32_t dim = 1u << n_sites, mask = dim - 1;
  Matrix t = Matrix::Zero(dim, dim);
  for (std::uint32_t s = 0; s < dim; ++s) {
    const std::uint32_t shifted = ((s << 1) | (s >> (n_sites - 1))) & mask;
    t(shifted, s) = 1.0;
  }
  return t;
}

Vector parity_diagonal(int n_sites) {
  check_sites(n_sites);
  const std::uint32_t dim = 1u << n_sites;
  Vector d(dim);
  for (std::uint32_t s = 0; s < dim; ++s) d[s] = (std::popcount(s) & 1) ? -1.0 : 1.0;
  return d;
}

namespace {

int sites_of(Eigen::Index dim) {
  int n = 0;
  while ((Eigen::Index{1} << n) < dim) ++n;
  if ((Eigen::Index{1} << n) != dim) throw std::invalid_argument("state dimension is not a power of two");
  return n;
}

}  // namespace

double parity_expectation(const Vector& psi) {
  return psi.cwiseAbs2().dot(parity_diagonal(sites_of(psi.size())));
}

double parity_expectation(const CVector& psi) {
  return psi.cwiseAbs2().dot(parity_diagonal(sites_of(psi.size())));
}

double operator_norm(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

SpectralDecomposition::SpectralDecomposition(const Matrix& h) {
  if (h.rows() != h.cols() || h.rows() == 0) throw std::invalid_argument("Hamiltonian must be square and nonempty");
  if (!h.allFinite()) throw std::invalid_argument("Hamiltonian has non-finite entries");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver did not converge");
  energies_ = es.eigenvalues();
  states_ = es.eigenvectors();

  for (Eigen::Index c = 0; c < states_.cols(); ++c) {
    Eigen::Index arg = 0;
    const double top = states_.col(c).cwiseAbs().maxCoeff();
    // First entry within rounding of the maximum, so ties resolve the same way everywhere.
    while (std::abs(states_(arg, c)) < top - 1e-12) ++arg;
    if (states_(arg, c) < 0) states_.col(c) *= -1.0;
  }

  Eigen::Index first = 0;
  for (Eigen::Index i = 1; i <= energies_.size(); ++i) {
    if (i == energies_.size() || energies_[i] - energies_[i - 1] >= kDegeneracyTol) {
      blocks_.emplace_back(first, i);
      first = i;
    }
  }
}

Vector SpectralDecomposition::ground_state() const {
  if (dimension() > 1 && gap() < kDegeneracyTol)
    throw DegeneracyError("degenerate ground state (gap " + std::to_string(gap()) + ")", gap());
  return states_.col(0);
}

Matrix SpectralDecomposition::to_eigenbasis(const Matrix& a) const { return states_.transpose() * a * states_; }

Eigen::Matrix3cd qgt_spectral(const ModelParams& p) {
  check_sites(p.n_sites);
  const SpectralDecomposition spec(build_hamiltonian(p));
  const Vector psi0 = spec.ground_state();
  const Vector& e = spec.energies();

  // Column 0 of each derivative in the eigenbasis.
  std::array<Vector, 3> col;
  for (Coord mu : kCoords) col[static_cast<std::size_t>(index(mu))] = spec.states().transpose() * (derivative_operator(mu, p.n_sites) * psi0);

  Eigen::Matrix3cd q = Eigen::Matrix3cd::Zero();
  for (Eigen::Index n = 1; n < spec.dimension(); ++n) {
    const double w = 1.0 / ((e[0] - e[n]) * (e[0] - e[n]));
    for (int mu = 0; mu < 3; ++mu)
      for (int nu = 0; nu < 3; ++nu) q(mu, nu) += col[mu][n] * col[nu][n] * w;
  }
  return q;
}

Eigen::Matrix3cd qgt_from_stencil(const CVector& center, const std::array<StencilStates, 3>& stencil, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("stencil step must be positive");
  static constexpr double kWeights[4] = {1.0, -8.0, 8.0, -1.0};  // (-2s, -s, +s, +2s) / (12 s)
  std::array<CVector, 3> deriv;
  for (int mu = 0; mu < 3; ++mu) {
    CVector d = CVector::Zero(center.size());
    for (int j = 0; j < 4; ++j) {
      const CVector& psi = stencil[static_cast<std::size_t>(mu)].states[static_cast<std::size_t>(j)];
      const std::complex<double> ov = center.dot(psi);
      if (std::abs(ov) < 0.5)
        throw LevelCrossingError("stencil state lost overlap with the center state (|<psi|psi'>| = " +
                                 std::to_string(std::abs(ov)) + ")");
      d += kWeights[j] * (std::conj(ov) / std::abs(ov)) * psi;
    }
    deriv[static_cast<std::size_t>(mu)] = d / (12.0 * step);
  }

  Eigen::Matrix3cd q;
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) {
      const CVector& a = deriv[static_cast<std::size_t>(mu)];
      const CVector& b = deriv[static_cast<std::size_t>(nu)];
      q(mu, nu) = a.dot(b) - a.dot(center) * center.dot(b);
    }
  return q;
}

Eigen::Matrix3cd qgt_definition(const ModelParams& p, double step) {
  check_sites(p.n_sites);
  const auto ground = [&](const ModelParams& at) {
    const SpectralDecomposition spec(build_hamiltonian(at));
    if (spec.gap() < kDegeneracyTol)
      throw LevelCrossingError("ground level is degenerate on the stencil (gap " + std::to_string(spec.gap()) + ")");
    return CVector(spec.states().col(0).cast<std::complex<double>>());
  };

  const CVector center = ground(p);
  std::array<StencilStates, 3> stencil;
  static constexpr double kOffsets[4] = {-2.0, -1.0, 1.0, 2.0};
  for (Coord mu : kCoords) {
    const Vec3 e = unit_vector(mu);
    for (int j = 0; j < 4; ++j) {
      const double s = kOffsets[j] * step;
      stencil[static_cast<std::size_t>(index(mu))].states[static_cast<std::size_t>(j)] =
          ground(p.shifted({s * e[0], s * e[1], s * e[2]}));
    }
  }
  return qgt_from_stencil(center, stencil, step);
}

MetricTensor real_part(const Eigen::Matrix3cd& q, int n_sites, Scaling scaling) {
  MetricTensor g;
  const double s = scaling == Scaling::per_site ? 1.0 / n_sites : 1.0;
  // Symmetrize against rounding in the two off-diagonal copies.
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = mu; nu < 3; ++nu) g.set(mu, nu, 0.5 * (q(mu, nu).real() + q(nu, mu).real()) * s);
  g.rescaled = scaling == Scaling::per_site;
  return g;
}

}  // namespace qgt::ed
