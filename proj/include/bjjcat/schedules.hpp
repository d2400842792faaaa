#pragma once

#include <functional>
#include <optional>
#include <stdexcept>

namespace bjjcat {

struct ScheduleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Thrown by cd_infinite at the critical point, where the thermodynamic-limit
/// counter-diabatic amplitude has a genuine pole.
struct CriticalPointPole : ScheduleError {
  using ScheduleError::ScheduleError;
};

/// Transverse-field ramp over the scaled time s = t/t_f in [0,1].
///
/// Contract (checked at construction): field(0) = 2J, field(1/2) = J,
/// field(1) = 0, and dGamma/ds = 0 at those three points. The flat crossing
/// of the critical point at s = 1/2 is what keeps the finite-size
/// counter-diabatic amplitude continuous, so the constructor rejects ramps
/// that violate it. The shipped default is the quintic polynomial
///   Gamma(s) = J (48 s^5 - 120 s^4 + 100 s^3 - 30 s^2 + 2).
class RampSpec {
 public:
  using Profile = std::function<double(double)>;

  /// The default quintic ramp.
  static RampSpec polynomial(double coupling = 1.0, double duration = 1.0);

  /// Custom ramp; `value` is Gamma(s) in absolute energy units and `slope`
  /// its derivative with respect to s (not t).
  RampSpec(double coupling, double duration, Profile value, Profile slope);

  /// Gamma(s). Rejects s outside [0,1].
  double field(double s) const;

  /// dGamma/dt = slope(s)/t_f. Rejects s outside [0,1].
  double field_rate(double s) const;

  double coupling() const { return coupling_; }  // J
  double duration() const { return duration_; }  // t_f

 private:
  void validate() const;

  double coupling_;
  double duration_;
  Profile value_;
  Profile slope_;
};

/// Harmonic frequency of the thermodynamic-limit effective oscillator:
/// 2 sqrt(Gamma (Gamma - J)) for Gamma > J, 2 sqrt(J^2 - Gamma^2) for
/// Gamma < J, zero at the critical point.
double frequency_infinite(double field, double coupling);

/// Finite-size corrected frequency; strictly positive at Gamma = J for any
/// finite N >= 2. Throws std::domain_error when the radicand is not positive
/// (approximation breakdown) instead of returning NaN.
double frequency_finite(double field, double coupling, int n_atoms);

/// Thermodynamic-limit counter-diabatic amplitude. Diverges at Gamma = J
/// regardless of the ramp; throws CriticalPointPole there.
double cd_infinite(double s, const RampSpec& ramp);

/// Finite-size corrected counter-diabatic amplitude. Continuous on [0,1] and
/// exactly zero where Gamma = J, which the RampSpec contract makes consistent
/// between the two phase branches. Converges to cd_infinite as N -> infinity.
double cd_finite(double s, const RampSpec& ramp, int n_atoms);

/// Semiclassical double-well potential V(z) = -(J N / 2) z^2 - Gamma N sqrt(1 - z^2)
/// on the magnetization coordinate z in [-1,1].
double semiclassical_potential(double z, double field, double coupling, int n_atoms);

/// A ramp together with the particle number (or the thermodynamic limit when
/// n_atoms is empty); bundles the phase-resolved evaluators used by the
/// dynamics and by the schedule export.
class ScheduleSet {
 public:
  ScheduleSet(RampSpec ramp, std::optional<int> n_atoms);

  double field(double s) const { return ramp_.field(s); }
  double field_rate(double s) const { return ramp_.field_rate(s); }

  /// f(s): finite-size amplitude when N is set, thermodynamic-limit otherwise.
  double cd_amplitude(double s) const;

  /// omega(s) for the instantaneous field.
  double frequency(double s) const;

  const RampSpec& ramp() const { return ramp_; }
  std::optional<int> n_atoms() const { return n_atoms_; }

 private:
  RampSpec ramp_;
  std::optional<int> n_atoms_;
};

}  // namespace bjjcat
