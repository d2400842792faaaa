#pragma once

#include <stdexcept>
#include <vector>

#include "bjjcat/spin_ops.hpp"

namespace bjjcat {

struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct EigenPair {
  double value;
  Vector vector;
};

/// k lowest eigenpairs of a Hermitian banded operator, energies ascending,
/// eigenvectors orthonormal. The global phase of each vector is fixed by
/// making its largest-magnitude amplitude real and positive.
///
/// The complex Hermitian tridiagonal matrix is reduced to a real symmetric
/// one by a diagonal phase gauge; eigenvalues come from Sturm-sequence
/// bisection and eigenvectors from shifted inverse iteration, which keeps
/// each call O(k N) and robust for quasi-degenerate pairs.
std::vector<EigenPair> lowest_eigenpairs(const SpinOperator& h, int k);

/// Instantaneous ground-state subspace of the bare Hamiltonian.
/// dim = 1 in the disordered phase (Gamma > J); dim = 2 at and below the
/// critical point, where the two lowest states form the quasi-degenerate
/// doublet. For dim = 2 the basis is parity-adapted: vectors[0] is even and
/// vectors[1] odd under the m -> -m reflection, which fixes the degenerate
/// pair unambiguously.
struct GroundSubspace {
  int dim = 0;
  std::vector<Vector> vectors;
};

GroundSubspace ground_subspace(const SpinOperator& h, double field, double coupling);

/// p(m) = |<m|psi>|^2, indexed like the state (ascending m).
Eigen::VectorXd populations(const Vector& psi);

/// <psi|R|psi> where R is the m -> -m reflection. R commutes with every
/// Hamiltonian in this model, so this is the conserved parity, +1 or -1 on
/// symmetry eigenstates.
double parity_expectation(const Vector& psi);

/// R psi (amplitudes reversed).
Vector reflect(const Vector& psi);

}  // namespace bjjcat
