#pragma once

#include <stdexcept>
#include <vector>

#include "bjjcat/schedules.hpp"
#include "bjjcat/spin_ops.hpp"

namespace bjjcat {

enum class CdMode { Off, On, OnAfterCritical };

enum class Integrator {
  CrankNicolson,  // midpoint-sampled Cayley step, order 2, exactly unitary
  Magnus4,        // commutator-free 4th-order Magnus, Lanczos exponentials
};

int integrator_order(Integrator method);

/// Precomputed bands of the driven Hamiltonian
///   H(t) = chi S_z^2 + Omega(t) S_x + f(t) (S_y S_z + S_z S_y)/N,
/// with chi = -2J/N and Omega(t) = -2 Gamma(t). For t > t_f the ramp is
/// clamped, i.e. H(t) = H(t_f) (which is the diagonal chi S_z^2 since both
/// controls vanish at t_f).
struct Assembly {
  int n_atoms = 0;
  ScheduleSet schedule;
  Eigen::VectorXd sz2_diag;  // chi m^2
  Eigen::VectorXd sx_sub;    // real band of S_x, scaled by Omega(t)
  Eigen::VectorXd cd_sub;    // imaginary part of the CD band, scaled by f(t)
};

Assembly make_assembly(int n_atoms, const RampSpec& ramp);

SpinOperator hamiltonian(const Assembly& assembly, double t, CdMode mode);
inline SpinOperator hamiltonian(const Assembly& assembly, double t, bool cd_enabled) {
  return hamiltonian(assembly, t, cd_enabled ? CdMode::On : CdMode::Off);
}

/// Thrown by ground_state when the two lowest levels are too close for a
/// single vector to be meaningful; callers should use ground_subspace.
struct DegenerateGroundState : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Normalized lowest eigenvector, phase-fixed. Refuses near-degenerate
/// problems (gap below 1e3 x eigen tolerance).
Vector ground_state(const SpinOperator& h);

struct NormDriftError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PropagationResult {
  std::vector<double> times;   // sample times actually used (step-aligned)
  std::vector<Vector> states;  // one per sample time
  long step_count = 0;
  double norm_drift = 0.0;  // max |  ||psi||^2 - 1  | seen during the run
};

struct PropagateOptions {
  Integrator method = Integrator::CrankNicolson;
  double norm_tolerance = 1e-6;  // abort threshold on |norm^2 - 1|
};

/// Integrates i d/dt psi = H(t) psi from t = 0 to t_grid.back() with `steps`
/// fixed steps. States are recorded at the step boundaries nearest to the
/// requested times (exact when the grid is step-aligned). The norm is
/// monitored every step and never silently renormalized; a drift beyond
/// options.norm_tolerance aborts with step-size diagnostics.
PropagationResult propagate(const Vector& psi0, const Assembly& assembly,
                            const std::vector<double>& t_grid, long steps, CdMode mode,
                            const PropagateOptions& options = {});

/// Evolution under a fixed Hamiltonian (used by the post-ramp freeze and by
/// closed-form checks); records sample_count evenly spaced states, the last
/// one at t = duration.
PropagationResult propagate_constant(const Vector& psi0, const SpinOperator& h, double duration,
                                     long steps, const PropagateOptions& options = {},
                                     int sample_count = 1);

/// Post-ramp dynamics under the frozen H(t_f) = chi S_z^2. Diagonal
/// generator: populations are exactly time-independent, only phases evolve.
PropagationResult evolve_frozen(const Vector& psi_tf, const Assembly& assembly,
                                double extra_duration, long steps,
                                const PropagateOptions& options = {}, int sample_count = 5);

}  // namespace bjjcat
