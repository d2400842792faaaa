#include "bjjcat/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace bjjcat {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct RealTridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;     // non-negative after the gauge
  Eigen::VectorXcd gauge;  // unit phases; eigvec(H) = gauge .* eigvec(T)
  double scale = 1.0;      // inf norm, for tolerances
};

// Diagonal phase gauge making the band real non-negative: with d_0 = 1 and
// d_{i+1} = sub_i d_i / |sub_i|, conj(d_{i+1}) sub_i d_i = |sub_i|.
RealTridiagonal to_real_tridiagonal(const SpinOperator& h) {
  RealTridiagonal t;
  const int n = h.dim;
  t.diag = h.diag;
  t.sub = Eigen::VectorXd::Zero(std::max(0, n - 1));
  t.gauge.resize(n);
  t.gauge[0] = Complex(1.0, 0.0);
  for (int i = 0; i + 1 < n; ++i) {
    const Complex b = h.bandwidth == 1 ? h.sub[i] : Complex(0.0, 0.0);
    const double mag = std::abs(b);
    t.sub[i] = mag;
    t.gauge[i + 1] = mag > 0.0 ? b * t.gauge[i] / mag : t.gauge[i];
  }
  t.scale = std::max(h.inf_norm(), 1.0);
  return t;
}

// Number of eigenvalues of T strictly below x (Sturm sequence via the
// LDL^T pivots, with the usual pivot floor).
int sturm_count(const RealTridiagonal& t, double x) {
  const int n = static_cast<int>(t.diag.size());
  const double pivmin = kEps * kEps * t.scale;
  int count = 0;
  double q = t.diag[0] - x;
  if (std::abs(q) < pivmin) q = -pivmin;
  if (q < 0.0) ++count;
  for (int i = 1; i < n; ++i) {
    q = t.diag[i] - x - t.sub[i - 1] * t.sub[i - 1] / q;
    if (std::abs(q) < pivmin) q = -pivmin;
    if (q < 0.0) ++count;
  }
  return count;
}

// Bisection for the index-th (0-based) eigenvalue.
double bisect_eigenvalue(const RealTridiagonal& t, int index) {
  const int n = static_cast<int>(t.diag.size());
  double lo = t.diag[0], hi = t.diag[0];
  for (int i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += t.sub[i - 1];
    if (i + 1 < n) r += t.sub[i];
    lo = std::min(lo, t.diag[i] - r);
    hi = std::max(hi, t.diag[i] + r);
  }
  const double span = hi - lo;
  lo -= kEps * std::abs(lo) + kEps * span;
  hi += kEps * std::abs(hi) + kEps * span;
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (sturm_count(t, mid) >= index + 1) {
      hi = mid;
    } else {
      lo = mid;
    }
    if (hi - lo <= 2.0 * kEps * std::max(std::abs(lo), std::abs(hi)) + 2.0 * kEps * t.scale) break;
  }
  return 0.5 * (lo + hi);
}

// Tridiagonal LU with partial pivoting (the dgttrf/dgtts2 scheme); solves
// (T - shift I) x = b in place. Pivoting fills a second superdiagonal and is
// required here because the shifted matrix is nearly singular by design;
// tiny pivots are floored instead of failing, the usual inverse-iteration
// device.
class ShiftedSolver {
 public:
  ShiftedSolver(const RealTridiagonal& t, double shift) {
    const int n = static_cast<int>(t.diag.size());
    d_.resize(n);
    dl_.assign(std::max(0, n - 1), 0.0);
    du_.assign(std::max(0, n - 1), 0.0);
    du2_.assign(std::max(0, n - 2), 0.0);
    swap_.assign(std::max(0, n - 1), false);
    for (int i = 0; i < n; ++i) d_[i] = t.diag[i] - shift;
    for (int i = 0; i + 1 < n; ++i) dl_[i] = du_[i] = t.sub[i];
    const double tiny = kEps * kEps * t.scale + std::numeric_limits<double>::min();
    for (int i = 0; i + 1 < n; ++i) {
      if (std::abs(d_[i]) >= std::abs(dl_[i])) {
        if (std::abs(d_[i]) < tiny) d_[i] = tiny;
        const double fact = dl_[i] / d_[i];
        dl_[i] = fact;
        d_[i + 1] -= fact * du_[i];
      } else {
        swap_[i] = true;
        const double fact = d_[i] / dl_[i];
        d_[i] = dl_[i];
        dl_[i] = fact;
        const double temp = du_[i];
        du_[i] = d_[i + 1];
        d_[i + 1] = temp - fact * d_[i + 1];
        if (i + 2 < n) {
          du2_[i] = du_[i + 1];
          du_[i + 1] = -fact * du_[i + 1];
        }
      }
    }
    for (int i = 0; i < n; ++i) {
      if (std::abs(d_[i]) < tiny) d_[i] = tiny;
    }
  }

  void solve(Eigen::VectorXd& b) const {
    const int n = static_cast<int>(d_.size());
    for (int i = 0; i + 1 < n; ++i) {
      if (!swap_[i]) {
        b[i + 1] -= dl_[i] * b[i];
      } else {
        const double temp = b[i];
        b[i] = b[i + 1];
        b[i + 1] = temp - dl_[i] * b[i + 1];
      }
    }
    for (int i = n - 1; i >= 0; --i) {
      double v = b[i];
      if (i + 1 < n) v -= du_[i] * b[i + 1];
      if (i + 2 < n) v -= du2_[i] * b[i + 2];
      b[i] = v / d_[i];
    }
  }

 private:
  Eigen::VectorXd d_;
  std::vector<double> dl_, du_, du2_;
  std::vector<bool> swap_;
};

// Inverse iteration for the eigenvalue `lambda`, orthogonalized against the
// vectors already found (handles exactly and nearly degenerate clusters).
Eigen::VectorXd inverse_iteration(const RealTridiagonal& t, double lambda,
                                  const std::vector<Eigen::VectorXd>& found, int index) {
  const int n = static_cast<int>(t.diag.size());
  std::mt19937_64 rng(0x9e3779b97f4a7c15ull ^ (static_cast<uint64_t>(index) << 32) ^ n);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  for (int attempt = 0; attempt < 4; ++attempt) {
    // a mild shift perturbation on retries separates coincident pivots
    const double shift = lambda + attempt * 16.0 * kEps * t.scale;
    ShiftedSolver solver(t, shift);
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = uni(rng);
    v.normalize();
    for (int iter = 0; iter < 6; ++iter) {
      solver.solve(v);
      for (const auto& w : found) v -= w.dot(v) * w;
      const double nrm = v.norm();
      if (!(nrm > 0.0) || !std::isfinite(nrm)) break;
      v /= nrm;
    }
    // residual in the real gauge
    double res = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = (t.diag[i] - lambda) * v[i];
      if (i > 0) r += t.sub[i - 1] * v[i - 1];
      if (i + 1 < n) r += t.sub[i] * v[i + 1];
      res += r * r;
    }
    if (std::sqrt(res) <= 1e-10 * t.scale && std::isfinite(v.sum())) return v;
  }
  std::ostringstream msg;
  msg << "inverse iteration failed to converge for eigenvalue index " << index << " (lambda=" << lambda
      << ", dim=" << n << ")";
  throw ConvergenceError(msg.str());
}

void fix_phase(Vector& v) {
  int imax = 0;
  double best = 0.0;
  for (int i = 0; i < v.size(); ++i) {
    const double a = std::norm(v[i]);
    if (a > best) {
      best = a;
      imax = i;
    }
  }
  const double mag = std::abs(v[imax]);
  if (mag > 0.0) v *= std::conj(v[imax]) / mag;
}

}  // namespace

std::vector<EigenPair> lowest_eigenpairs(const SpinOperator& h, int k) {
  if (h.dim < 1) throw std::invalid_argument("empty operator");
  if (k < 1 || k > h.dim) throw std::invalid_argument("eigenpair count k must satisfy 1 <= k <= dim");
  const RealTridiagonal t = to_real_tridiagonal(h);

  std::vector<double> values(k);
  for (int j = 0; j < k; ++j) values[j] = bisect_eigenvalue(t, j);

  std::vector<Eigen::VectorXd> real_vecs;
  real_vecs.reserve(k);
  for (int j = 0; j < k; ++j) {
    real_vecs.push_back(inverse_iteration(t, values[j], real_vecs, j));
  }

  std::vector<EigenPair> out(k);
  for (int j = 0; j < k; ++j) {
    Vector v(h.dim);
    for (int i = 0; i < h.dim; ++i) v[i] = t.gauge[i] * real_vecs[j][i];
    fix_phase(v);
    out[j].value = values[j];
    out[j].vector = std::move(v);
    // final residual check against the original operator
    const Vector r = h.apply(out[j].vector) - values[j] * out[j].vector;
    if (r.norm() > 1e-9 * t.scale) {
      std::ostringstream msg;
      msg << "eigenpair residual " << r.norm() << " exceeds tolerance for eigenvalue " << values[j];
      throw ConvergenceError(msg.str());
    }
  }
  return out;
}

GroundSubspace ground_subspace(const SpinOperator& h, double field, double coupling) {
  GroundSubspace sub;
  sub.dim = field > coupling ? 1 : 2;
  auto pairs = lowest_eigenpairs(h, sub.dim);
  if (sub.dim == 1) {
    sub.vectors.push_back(std::move(pairs[0].vector));
    return sub;
  }

  // Parity-adapt the doublet: diagonalize the reflection R restricted to the
  // 2D span. The span is R-invariant up to the eigensolver residual, so the
  // restricted matrix is a Hermitian involution with eigenvalues near +-1.
  const Vector& a = pairs[0].vector;
  const Vector& b = pairs[1].vector;
  const Vector ra = reflect(a);
  const Vector rb = reflect(b);
  const double r00 = std::real(a.dot(ra));
  const double r11 = std::real(b.dot(rb));
  const Complex r01 = a.dot(rb);

  Vector even, odd;
  if (std::abs(r01) < 1e-8 && std::abs(std::abs(r00) - 1.0) < 1e-6) {
    even = r00 > 0.0 ? a : b;
    odd = r00 > 0.0 ? b : a;
  } else {
    // 2x2 Hermitian eigenproblem [[r00, r01],[conj(r01), r11]]
    const double tr = r00 + r11;
    const double det = r00 * r11 - std::norm(r01);
    const double disc = std::sqrt(std::max(0.25 * tr * tr - det, 0.0));
    const double lp = 0.5 * tr + disc;  // ~ +1 eigenvalue
    // eigenvector for lp: (r01, lp - r00)
    Complex c0 = r01, c1 = Complex(lp - r00, 0.0);
    double nn = std::sqrt(std::norm(c0) + std::norm(c1));
    if (nn < 1e-12) {
      c0 = Complex(1.0, 0.0);
      c1 = Complex(0.0, 0.0);
      nn = 1.0;
    }
    even = (c0 / nn) * a + (c1 / nn) * b;
    // odd partner: orthogonal complement in the span
    odd = (-std::conj(c1) / nn) * a + (std::conj(c0) / nn) * b;
  }
  even.normalize();
  odd -= even.dot(odd) * even;
  odd.normalize();
  fix_phase(even);
  fix_phase(odd);
  sub.vectors.push_back(std::move(even));
  sub.vectors.push_back(std::move(odd));
  return sub;
}

Eigen::VectorXd populations(const Vector& psi) {
  Eigen::VectorXd p(psi.size());
  for (int i = 0; i < psi.size(); ++i) p[i] = std::norm(psi[i]);
  return p;
}

Vector reflect(const Vector& psi) { return psi.reverse(); }

double parity_expectation(const Vector& psi) {
  return std::real(psi.dot(reflect(psi)));
}

}  // namespace bjjcat
