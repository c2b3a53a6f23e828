#pragma once

// A quench H(lambda) -> H^q = H(lambda + q) on a small chain, with everything
// evaluated in the eigenbasis of H^q: exact phases instead of time stepping,
// and closed-form time integrals.

#include "qgt/ed.hpp"

#include <array>
#include <vector>

namespace qgt::ed {

/// Integral of e^{i w t'} over [0, t]; the |w| < kDegeneracyTol limit is t.
std::complex<double> phase_integral(double w, double t);

class QuenchSystem {
 public:
  /// `z_field`, if nonempty, adds sum_i f_i Z_i to both H and H^q (used to lift
  /// symmetry degeneracies). Throws DegeneracyError if H(lambda) has a
  /// degenerate ground level.
  explicit QuenchSystem(const QuenchSpec& quench, Vector z_field = {});

  const QuenchSpec& quench() const { return spec_; }
  int n_sites() const { return spec_.base.n_sites; }
  bool translation_invariant() const { return field_.size() == 0; }

  const Matrix& hamiltonian() const { return h_; }
  const Matrix& quench_hamiltonian() const { return hq_; }
  const SpectralDecomposition& initial_spectrum() const { return initial_; }
  const SpectralDecomposition& quench_spectrum() const { return post_; }

  /// Ground state of H(lambda).
  const Vector& ground_state() const { return psi0_; }
  double ground_parity() const { return parity_expectation(psi0_); }
  /// Ground state expanded in the H^q eigenbasis.
  const Vector& quench_coefficients() const { return coeff_; }

  /// Local terms H_i of H(lambda), including the z field if present; they sum to hamiltonian().
  std::vector<Matrix> local_hamiltonians() const;

  const Matrix& derivative(Coord mu) const { return dh_[static_cast<std::size_t>(index(mu))]; }
  /// d_mu H^q in the H^q eigenbasis.
  const Matrix& derivative_quench_basis(Coord mu) const { return dhq_[static_cast<std::size_t>(index(mu))]; }

  /// exp(-i t H^q) applied to a state.
  CVector evolve(const CVector& state, double t) const;

  /// D = int_0^t U^dag A U, for an operator given in the H^q eigenbasis;
  /// result in the same basis.
  CMatrix d_tilde(const Matrix& a_quench_basis, double t) const;
  /// Applies an operator given in the H^q eigenbasis to a computational-basis vector.
  CVector apply_quench_basis(const CMatrix& op, const CVector& v) const;
  /// D for d_mu H^q, in the computational basis.
  CMatrix d_operator(Coord mu, double t) const;
  /// D for the local term d_mu H^q_j, in the computational basis.
  CMatrix local_d_operator(Coord mu, int site, double t) const;
  /// D_mu psi_0 in the computational basis.
  CVector d_on_ground(Coord mu, double t) const;

  /// Full q_{mu nu}(t): amplitudes (<n|dH|0> + <n|[H, iD]|0>) / (E_0 - E_n) over
  /// the H(lambda) eigenbasis, n outside the ground level. Raw.
  Eigen::Matrix3cd qgt_quench(double t) const;
  double q_general(Coord mu, double t) const;

  /// The simplified-quench tensor three ways.
  double q1_spectral(Coord mu, double t) const;
  /// <D^2> - <D>^2 in the initial ground state.
  double q1_variance(Coord mu, double t) const;
  /// N sum_j Re(<D_0 D_j> - <D_0><D_j>); needs translation invariance.
  double q1_gcor(Coord mu, double t) const;

  /// Per-site correlator double integrals int int <dH_0(t') dH_j(t'')>_C for
  /// j = 0 .. N-1; their sum is q1 / N.
  std::vector<double> connected_corr_profile(Coord mu, double t) const;
  double connected_corr_integral(Coord mu, double t) const;

  /// Tr rho_bar^2 for rho = |psi_0><psi_0| dephased in the H^q eigenbasis,
  /// degenerate levels grouped.
  double dephased_purity() const;

 private:
  std::array<CVector, 3> xi_amplitudes(double t, bool include_static) const;

  QuenchSpec spec_;
  Vector field_;
  Matrix h_, hq_;
  SpectralDecomposition initial_, post_;
  Vector psi0_, coeff_;
  std::array<Matrix, 3> dh_, dhq_;
};

}  // namespace qgt::ed
