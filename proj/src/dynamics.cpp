#include "bjjcat/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "bjjcat/spectrum.hpp"

namespace bjjcat {

namespace {

constexpr Complex kI(0.0, 1.0);

// Fills the complex band of H(t) given the scalar controls.
void fill_band(const Assembly& a, double omega_drive, double f, Eigen::VectorXcd& sub) {
  const int nb = static_cast<int>(a.sx_sub.size());
  for (int i = 0; i < nb; ++i) {
    sub[i] = Complex(omega_drive * a.sx_sub[i], f * a.cd_sub[i]);
  }
}

double cd_amplitude_at(const Assembly& a, double s, CdMode mode) {
  switch (mode) {
    case CdMode::Off:
      return 0.0;
    case CdMode::On:
      return a.schedule.cd_amplitude(s);
    case CdMode::OnAfterCritical:
      return s >= 0.5 ? a.schedule.cd_amplitude(s) : 0.0;
  }
  return 0.0;
}

double clamped_s(const Assembly& a, double t) {
  const double s = t / a.schedule.ramp().duration();
  return std::min(s, 1.0);
}

// One Crank-Nicolson step psi <- (1 + i dt/2 H)^-1 (1 - i dt/2 H) psi with
// the band already filled from the midpoint Hamiltonian. Cayley transform of
// a Hermitian matrix: exactly unitary, second order in dt.
class CrankNicolsonCore {
 public:
  explicit CrankNicolsonCore(int dim)
      : rhs_(dim), cp_(std::max(0, dim - 1)), dp_(dim) {}

  void step(const Eigen::VectorXd& diag, const Eigen::VectorXcd& sub, double dt, Vector& psi) {
    const int n = static_cast<int>(psi.size());
    const double theta = 0.5 * dt;
    // rhs = (1 - i theta H) psi
    for (int i = 0; i < n; ++i) {
      Complex h = diag[i] * psi[i];
      if (i > 0) h += sub[i - 1] * psi[i - 1];
      if (i + 1 < n) h += std::conj(sub[i]) * psi[i + 1];
      rhs_[i] = psi[i] - kI * theta * h;
    }
    // Thomas solve of (1 + i theta H) psi = rhs. The matrix is strictly
    // diagonally dominant at any sensible step size (theta * band << 1), so
    // no pivoting is needed.
    Complex denom = Complex(1.0, theta * diag[0]);
    dp_[0] = rhs_[0] / denom;
    if (n > 1) cp_[0] = kI * theta * std::conj(sub[0]) / denom;
    for (int i = 1; i < n; ++i) {
      const Complex lower = kI * theta * sub[i - 1];
      denom = Complex(1.0, theta * diag[i]) - lower * cp_[i - 1];
      dp_[i] = (rhs_[i] - lower * dp_[i - 1]) / denom;
      if (i + 1 < n) cp_[i] = kI * theta * std::conj(sub[i]) / denom;
    }
    psi[n - 1] = dp_[n - 1];
    for (int i = n - 2; i >= 0; --i) psi[i] = dp_[i] - cp_[i] * psi[i + 1];
  }

 private:
  Eigen::VectorXcd rhs_, cp_, dp_;
};

// Applies exp(-i dt M) to v by the Lanczos method, M Hermitian tridiagonal
// given band-wise. Fully reorthogonalized; the Krylov dimension grows until
// the coefficient vector stabilizes to ~1e-13 or the space is exhausted.
class LanczosExp {
 public:
  explicit LanczosExp(int dim) : dim_(dim), w_(dim) {}

  void apply(const Eigen::VectorXd& diag, const Eigen::VectorXcd& sub, double dt, Vector& v) {
    const int max_m = std::min(dim_, 40);
    const double beta0 = v.norm();
    if (!(beta0 > 0.0)) return;
    basis_.clear();
    basis_.push_back(v / beta0);
    alpha_.clear();
    beta_.clear();

    Eigen::VectorXcd prev_u;
    int m = 0;
    while (true) {
      // w = M q_m  (minus projections)
      matvec(diag, sub, basis_[m], w_);
      alpha_.push_back(std::real(basis_[m].dot(w_)));
      w_ -= alpha_[m] * basis_[m];
      if (m > 0) w_ -= beta_[m - 1] * basis_[m - 1];
      for (const auto& q : basis_) w_ -= q.dot(w_) * q;  // full reorthogonalization
      const double b = w_.norm();

      Eigen::VectorXcd u = small_exp(dt, m + 1);
      bool done = false;
      if (b < 1e-13 || m + 1 >= max_m) {
        done = true;  // invariant subspace (exact) or dimension cap
      } else if (prev_u.size() > 0) {
        double diff2 = std::norm(u[m]);
        for (int i = 0; i < m; ++i) diff2 += std::norm(u[i] - prev_u[i]);
        if (std::sqrt(diff2) < 1e-13) done = true;
      }
      if (done) {
        v.setZero();
        for (int i = 0; i <= m; ++i) v += (beta0 * u[i]) * basis_[i];
        return;
      }
      beta_.push_back(b);
      basis_.push_back(w_ / b);
      prev_u = std::move(u);
      ++m;
    }
  }

 private:
  void matvec(const Eigen::VectorXd& diag, const Eigen::VectorXcd& sub, const Vector& x, Vector& y) const {
    const int n = dim_;
    for (int i = 0; i < n; ++i) {
      Complex h = diag[i] * x[i];
      if (i > 0) h += sub[i - 1] * x[i - 1];
      if (i + 1 < n) h += std::conj(sub[i]) * x[i + 1];
      y[i] = h;
    }
  }

  // exp(-i dt T_m) e_1 for the small symmetric tridiagonal T_m.
  Eigen::VectorXcd small_exp(double dt, int m) const {
    Eigen::MatrixXd tm = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) tm(i, i) = alpha_[i];
    for (int i = 0; i + 1 < m; ++i) tm(i, i + 1) = tm(i + 1, i) = beta_[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(tm);
    Eigen::VectorXcd u = Eigen::VectorXcd::Zero(m);
    for (int k = 0; k < m; ++k) {
      const Complex phase = std::exp(Complex(0.0, -dt * es.eigenvalues()[k]));
      u += phase * es.eigenvectors().col(k)(0) * es.eigenvectors().col(k).cast<Complex>();
    }
    return u;
  }

  int dim_;
  Vector w_;
  std::vector<Vector> basis_;
  std::vector<double> alpha_, beta_;
};

// Gauss-Legendre nodes and the CF4 mixing weights.
constexpr double kGaussOffset = 0.2886751345948128823;  // sqrt(3)/6
constexpr double kMixA = 0.25 + kGaussOffset;
constexpr double kMixB = 0.25 - kGaussOffset;

struct SampleSink {
  std::vector<long> indices;  // step indices at which to record, ascending
  PropagationResult* out = nullptr;
};

// Shared fixed-step driver. band_at(time, sub) fills the band of H(time).
PropagationResult run_fixed_step(const Vector& psi0, const Eigen::VectorXd& diag,
                                 const std::function<void(double, Eigen::VectorXcd&)>& band_at,
                                 double t0, double duration, long steps,
                                 const std::vector<double>& sample_times,
                                 const PropagateOptions& options) {
  const int n = static_cast<int>(psi0.size());
  if (steps < 1) throw std::invalid_argument("steps must be >= 1");
  if (!(duration > 0.0)) throw std::invalid_argument("duration must be positive");
  if (std::abs(psi0.squaredNorm() - 1.0) > 1e-6) {
    throw std::invalid_argument("initial state must be normalized");
  }

  const double dt = duration / static_cast<double>(steps);
  PropagationResult result;
  result.step_count = steps;

  std::vector<long> sample_idx(sample_times.size());
  for (size_t i = 0; i < sample_times.size(); ++i) {
    const double rel = (sample_times[i] - t0) / dt;
    sample_idx[i] = std::clamp<long>(std::llround(rel), 0, steps);
    if (i > 0 && sample_idx[i] < sample_idx[i - 1]) {
      throw std::invalid_argument("sample times must be ascending");
    }
  }

  CrankNicolsonCore cn(n);
  LanczosExp lanczos(n);
  Eigen::VectorXcd band(std::max(0, n - 1));
  Eigen::VectorXcd band2(std::max(0, n - 1));
  Eigen::VectorXd mixed_diag;
  Eigen::VectorXcd mixed_sub(std::max(0, n - 1));
  if (options.method == Integrator::Magnus4) mixed_diag = 0.5 * diag;

  Vector psi = psi0;
  size_t next_sample = 0;
  for (long k = 0;; ++k) {
    while (next_sample < sample_idx.size() && sample_idx[next_sample] == k) {
      result.times.push_back(t0 + k * dt);
      result.states.push_back(psi);
      ++next_sample;
    }
    if (k == steps) break;

    const double t = t0 + k * dt;
    if (options.method == Integrator::CrankNicolson) {
      band_at(t + 0.5 * dt, band);
      cn.step(diag, band, dt, psi);
    } else {
      band_at(t + (0.5 - kGaussOffset) * dt, band);
      band_at(t + (0.5 + kGaussOffset) * dt, band2);
      // exp(-i dt (a H1 + b H2)) then exp(-i dt (b H1 + a H2))
      mixed_sub = kMixA * band + kMixB * band2;
      lanczos.apply(mixed_diag, mixed_sub, dt, psi);
      mixed_sub = kMixB * band + kMixA * band2;
      lanczos.apply(mixed_diag, mixed_sub, dt, psi);
    }

    const double drift = std::abs(psi.squaredNorm() - 1.0);
    result.norm_drift = std::max(result.norm_drift, drift);
    if (drift > options.norm_tolerance) {
      std::ostringstream msg;
      msg << "norm drift " << drift << " exceeded tolerance " << options.norm_tolerance
          << " at t = " << t + dt << " (dt = " << dt << ", step " << k + 1 << " of " << steps << ")";
      throw NormDriftError(msg.str());
    }
  }
  return result;
}

}  // namespace

int integrator_order(Integrator method) {
  return method == Integrator::CrankNicolson ? 2 : 4;
}

Assembly make_assembly(int n_atoms, const RampSpec& ramp) {
  if (n_atoms < 2) throw std::invalid_argument("dynamics needs n_atoms >= 2");
  const double chi = -2.0 * ramp.coupling() / n_atoms;
  const SpinOperator sz = spin_z(n_atoms);
  const SpinOperator sx = spin_x(n_atoms);
  const SpinOperator cd = cd_operator(n_atoms);

  Assembly a{n_atoms, ScheduleSet(ramp, n_atoms), {}, {}, {}};
  a.sz2_diag.resize(n_atoms + 1);
  for (int i = 0; i <= n_atoms; ++i) a.sz2_diag[i] = chi * sz.diag[i] * sz.diag[i];
  a.sx_sub.resize(n_atoms);
  a.cd_sub.resize(n_atoms);
  for (int i = 0; i < n_atoms; ++i) {
    a.sx_sub[i] = std::real(sx.sub[i]);
    a.cd_sub[i] = std::imag(cd.sub[i]);
  }
  return a;
}

SpinOperator hamiltonian(const Assembly& assembly, double t, CdMode mode) {
  if (t < 0.0) throw std::invalid_argument("time must be non-negative");
  const double s = clamped_s(assembly, t);
  const double omega_drive = -2.0 * assembly.schedule.field(s);
  const double f = cd_amplitude_at(assembly, s, mode);

  SpinOperator h;
  h.dim = assembly.n_atoms + 1;
  h.bandwidth = 1;
  h.diag = assembly.sz2_diag;
  h.sub.resize(assembly.n_atoms);
  fill_band(assembly, omega_drive, f, h.sub);
  return h;
}

Vector ground_state(const SpinOperator& h) {
  auto pairs = lowest_eigenpairs(h, std::min(2, h.dim));
  if (pairs.size() == 2) {
    const double scale = std::max(h.inf_norm(), 1.0);
    const double gap = pairs[1].value - pairs[0].value;
    if (gap < 1e-9 * scale) {
      std::ostringstream msg;
      msg << "ground state is quasi-degenerate (gap " << gap << ", scale " << scale
          << "); use ground_subspace instead";
      throw DegenerateGroundState(msg.str());
    }
  }
  return std::move(pairs[0].vector);
}

PropagationResult propagate(const Vector& psi0, const Assembly& assembly,
                            const std::vector<double>& t_grid, long steps, CdMode mode,
                            const PropagateOptions& options) {
  if (t_grid.empty()) throw std::invalid_argument("t_grid must not be empty");
  for (double t : t_grid) {
    if (t < 0.0 || t > t_grid.back()) throw std::invalid_argument("t_grid must be ascending and non-negative");
  }
  const double horizon = t_grid.back();
  auto band_at = [&](double t, Eigen::VectorXcd& sub) {
    const double s = clamped_s(assembly, t);
    fill_band(assembly, -2.0 * assembly.schedule.field(s), cd_amplitude_at(assembly, s, mode), sub);
  };
  return run_fixed_step(psi0, assembly.sz2_diag, band_at, 0.0, horizon, steps, t_grid, options);
}

PropagationResult propagate_constant(const Vector& psi0, const SpinOperator& h, double duration,
                                     long steps, const PropagateOptions& options, int sample_count) {
  if (sample_count < 1) throw std::invalid_argument("sample_count must be >= 1");
  std::vector<double> samples(sample_count);
  for (int i = 0; i < sample_count; ++i) {
    samples[i] = duration * static_cast<double>(i + 1) / sample_count;
  }
  auto band_at = [&](double, Eigen::VectorXcd& sub) {
    if (h.bandwidth == 1) {
      sub = h.sub;
    } else {
      sub.setZero();
    }
  };
  return run_fixed_step(psi0, h.diag, band_at, 0.0, duration, steps, samples, options);
}

PropagationResult evolve_frozen(const Vector& psi_tf, const Assembly& assembly,
                                double extra_duration, long steps, const PropagateOptions& options,
                                int sample_count) {
  const SpinOperator h_tf = hamiltonian(assembly, assembly.schedule.ramp().duration(), CdMode::On);
  return propagate_constant(psi_tf, h_tf, extra_duration, steps, options, sample_count);
}

}  // namespace bjjcat
