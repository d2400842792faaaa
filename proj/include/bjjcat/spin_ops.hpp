#pragma once

#include <complex>

#include <Eigen/Core>

namespace bjjcat {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;

/// Hermitian operator on the maximal-spin sector (S = N/2), stored band-wise
/// in the S_z eigenbasis ordered by ascending m = -S..S.
///
/// Only the diagonal and the first subdiagonal are stored:
///   diag[i] = <m_i|A|m_i>          (real; the diagonal of a Hermitian matrix)
///   sub[i]  = <m_{i+1}|A|m_i>      (complex)
/// The superdiagonal is conj(sub), so Hermiticity holds exactly at the
/// representation level. Everything in this problem is tridiagonal, which
/// keeps matrix-vector products O(N).
struct SpinOperator {
  int dim = 0;        // N + 1
  int bandwidth = 0;  // 0 = diagonal, 1 = tridiagonal
  Eigen::VectorXd diag;
  Eigen::VectorXcd sub;  // size dim-1 when bandwidth == 1, empty otherwise

  double spin() const { return 0.5 * (dim - 1); }
  double m_of(int i) const { return static_cast<double>(i) - spin(); }

  /// Banded matrix-vector product A x.
  Vector apply(const Vector& x) const;

  /// <x|A|x>, real by Hermiticity.
  double expectation(const Vector& x) const;

  /// Infinity norm (max absolute row sum); used to scale tolerances.
  double inf_norm() const;
};

/// S_z: diagonal entries m = -N/2 .. N/2.
SpinOperator spin_z(int n_atoms);

/// S_x: real symmetric tridiagonal, <m+1|S_x|m> = (1/2) sqrt(S(S+1) - m(m+1)).
SpinOperator spin_x(int n_atoms);

/// S_y: purely imaginary tridiagonal, <m+1|S_y|m> = -(i/2) sqrt(S(S+1) - m(m+1)).
SpinOperator spin_y(int n_atoms);

/// (S_y S_z + S_z S_y)/N: the counter-diabatic coupling operator. Assembled
/// from the ladder formulas, <m+1|.|m> = -(i/2N) (2m+1) sqrt(S(S+1) - m(m+1)),
/// so the band representation is exact (zero diagonal, imaginary band).
SpinOperator cd_operator(int n_atoms);

}  // namespace bjjcat
