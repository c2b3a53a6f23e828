#pragma once

// Dense exact diagonalization of the periodic Cluster-XY chain, N <= 12.
//
// Basis state s is a bit string with bit i set when spin i points down
// (Z_i = -1). The Hamiltonian only contains Pauli strings with an even number
// of Y factors, so every operator built here is real.

#include "qgt/model.hpp"

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace qgt::ed {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr int kMinSites = 3;
inline constexpr int kMaxSites = 12;
/// Energies closer than this are treated as one level.
inline constexpr double kDegeneracyTol = 1e-10;

/// Throws std::invalid_argument unless kMinSites <= n <= kMaxSites.
void check_sites(int n_sites);

class PauliString {
 public:
  /// `ops` has one character per site from {I, X, Y, Z}.
  PauliString(std::string ops, double coefficient = 1.0);
  /// Identity everywhere except the listed (site, symbol) pairs.
  static PauliString on_sites(int n_sites, std::initializer_list<std::pair<int, char>> ops, double coefficient = 1.0);

  const std::string& ops() const { return ops_; }
  double coefficient() const { return coefficient_; }
  int n_sites() const { return static_cast<int>(ops_.size()); }
  std::vector<int> support() const;

  std::uint32_t flip_mask() const { return x_ | y_; }
  /// Sites contributing a (-1)^bit sign.
  std::uint32_t sign_mask() const { return z_ | y_; }
  int y_count() const;

  /// P|s> = amplitude * |s ^ flip_mask()>; amplitude is real for even y_count().
  std::complex<double> amplitude(std::uint32_t s) const;

  /// Adds coefficient * P to a dense matrix; requires an even number of Y.
  void accumulate(Matrix& m) const;
  Matrix matrix() const;

 private:
  std::string ops_;
  double coefficient_;
  std::uint32_t x_ = 0, y_ = 0, z_ = 0;
};

using PauliSum = std::vector<PauliString>;

Matrix to_matrix(const PauliSum& terms, int n_sites);

/// Local terms H_i = -X_{i-1} Z_i X_{i+1} - h Z_i + lambda_y Y_i Y_{i+1} + lambda_x X_i X_{i+1}.
std::vector<PauliSum> local_terms(const ModelParams& p);
/// dH_j / d mu: X_j X_{j+1}, Y_j Y_{j+1} or -Z_j.
PauliString derivative_term(Coord mu, int site, int n_sites);

Matrix build_hamiltonian(const ModelParams& p);
Matrix derivative_operator(Coord mu, int n_sites);
Matrix local_derivative_operator(Coord mu, int site, int n_sites);
/// sum_i f_i Z_i.
Matrix z_field_operator(const Vector& field);

/// Permutation T with T|s_0 s_1 ...> = |s_{N-1} s_0 ...>.
Matrix translation_operator(int n_sites);
/// Diagonal of prod_i Z_i.
Vector parity_diagonal(int n_sites);
/// <psi| prod_i Z_i |psi>.
double parity_expectation(const Vector& psi);
double parity_expectation(const CVector& psi);

/// Operator norm (largest singular value) of a symmetric matrix.
double operator_norm(const Matrix& a);

struct DegeneracyError : std::runtime_error {
  DegeneracyError(const std::string& what, double gap) : std::runtime_error(what), gap(gap) {}
  double gap;
};

struct LevelCrossingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Full eigensystem of a real symmetric matrix.
class SpectralDecomposition {
 public:
  explicit SpectralDecomposition(const Matrix& h);

  const Vector& energies() const { return energies_; }
  /// Columns are eigenvectors; the largest-magnitude entry of each is positive.
  const Matrix& states() const { return states_; }
  Eigen::Index dimension() const { return energies_.size(); }
  double gap() const { return energies_.size() > 1 ? energies_[1] - energies_[0] : 0.0; }

  /// Maximal runs [first, last) of levels joined by spacings below kDegeneracyTol.
  const std::vector<std::pair<Eigen::Index, Eigen::Index>>& blocks() const { return blocks_; }

  /// Throws DegeneracyError if the lowest level is degenerate.
  Vector ground_state() const;

  /// V^T a V.
  Matrix to_eigenbasis(const Matrix& a) const;

 private:
  Vector energies_;
  Matrix states_;
  std::vector<std::pair<Eigen::Index, Eigen::Index>> blocks_;
};

/// Q_{mu nu} = sum_{n != 0} <0|d_mu H|n><n|d_nu H|0> / (E_0 - E_n)^2, raw (not per site).
Eigen::Matrix3cd qgt_spectral(const ModelParams& p);

/// Ground states on the five-point stencil of one coordinate, ordered
/// (-2s, -s, +s, +2s).
struct StencilStates {
  std::array<CVector, 4> states;
};

/// Projector form <d_mu psi|(1 - P_0)|d_nu psi> from stencil states, after
/// fixing each stencil state's phase against `center`. Throws
/// LevelCrossingError when a stencil state has lost overlap with `center`.
Eigen::Matrix3cd qgt_from_stencil(const CVector& center, const std::array<StencilStates, 3>& stencil, double step);

/// Finite-difference QGT of the ground state, raw.
Eigen::Matrix3cd qgt_definition(const ModelParams& p, double step = 1e-3);

/// Real part as a MetricTensor, optionally divided by N.
MetricTensor real_part(const Eigen::Matrix3cd& q, int n_sites, Scaling scaling = Scaling::per_site);

}  // namespace qgt::ed
