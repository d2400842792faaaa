#pragma once

#include "bjjcat/spectrum.hpp"
#include "bjjcat/spin_ops.hpp"

namespace bjjcat {

/// First and second moments of S_z, cheap diagonal sums.
double sz_mean(const Vector& psi);
double sz_second_moment(const Vector& psi);

/// Projector weight of psi on the ground subspace, sum_k |<v_k|psi>|^2.
/// Reduces to the plain ground-state overlap when dim = 1 and is invariant
/// under re-mixing of a degenerate basis.
double subspace_fidelity(const Vector& psi, const GroundSubspace& sub);

/// E_res = <psi|H_final|psi> - E_gs with E_gs = -J N / 2.
double residual_energy(const Vector& psi, const SpinOperator& h_final, double coupling, int n_atoms);

/// m = sqrt(<S_z^2>) / S with S = N/2; 1 for the cat state, 0 at m = 0.
double order_parameter(const Vector& psi, int n_atoms);

/// 1 - order_parameter: the deficit from the symmetry-broken ground-state value.
double incomplete_magnetization(const Vector& psi, int n_atoms);

/// F_Q = 4 (<S_z^2> - <S_z>^2) for a pure state probed with S_z.
/// F_Q > N witnesses entanglement; F_Q = N^2 is the Heisenberg limit.
double quantum_fisher_information(const Vector& psi);

/// One row of the diagnostics trace.
struct DiagnosticsSample {
  double t = 0.0;
  double s = 0.0;
  double fidelity = 0.0;
  double energy = 0.0;
  double residual_energy = 0.0;
  double order_param = 0.0;
  double m_inc = 0.0;
  double qfi = 0.0;
};

}  // namespace bjjcat
