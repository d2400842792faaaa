#include "bjjcat/spin_ops.hpp"

#include <cmath>
#include <stdexcept>

namespace bjjcat {

namespace {

void require_n_atoms(int n_atoms) {
  if (n_atoms < 1) {
    throw std::invalid_argument("n_atoms must be >= 1 (the single-state space N=0 is not usable for dynamics)");
  }
}

// Ladder coefficient sqrt(S(S+1) - m(m+1)) for m = i - S.
double ladder(double s, int i) {
  const double m = static_cast<double>(i) - s;
  return std::sqrt(s * (s + 1.0) - m * (m + 1.0));
}

}  // namespace

Vector SpinOperator::apply(const Vector& x) const {
  Vector y(dim);
  if (bandwidth == 0) {
    for (int i = 0; i < dim; ++i) y[i] = diag[i] * x[i];
    return y;
  }
  for (int i = 0; i < dim; ++i) {
    Complex acc = diag[i] * x[i];
    if (i > 0) acc += sub[i - 1] * x[i - 1];
    if (i + 1 < dim) acc += std::conj(sub[i]) * x[i + 1];
    y[i] = acc;
  }
  return y;
}

double SpinOperator::expectation(const Vector& x) const {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) acc += diag[i] * std::norm(x[i]);
  if (bandwidth == 1) {
    // <x|A|x> = sum diag |x|^2 + 2 Re sum conj(x_{i+1}) sub_i x_i
    double band = 0.0;
    for (int i = 0; i + 1 < dim; ++i) {
      band += std::real(std::conj(x[i + 1]) * sub[i] * x[i]);
    }
    acc += 2.0 * band;
  }
  return acc;
}

double SpinOperator::inf_norm() const {
  double best = 0.0;
  for (int i = 0; i < dim; ++i) {
    double row = std::abs(diag[i]);
    if (bandwidth == 1) {
      if (i > 0) row += std::abs(sub[i - 1]);
      if (i + 1 < dim) row += std::abs(sub[i]);
    }
    best = std::max(best, row);
  }
  return best;
}

SpinOperator spin_z(int n_atoms) {
  require_n_atoms(n_atoms);
  SpinOperator op;
  op.dim = n_atoms + 1;
  op.bandwidth = 0;
  op.diag.resize(op.dim);
  const double s = 0.5 * n_atoms;
  for (int i = 0; i < op.dim; ++i) op.diag[i] = static_cast<double>(i) - s;
  return op;
}

SpinOperator spin_x(int n_atoms) {
  require_n_atoms(n_atoms);
  SpinOperator op;
  op.dim = n_atoms + 1;
  op.bandwidth = 1;
  op.diag = Eigen::VectorXd::Zero(op.dim);
  op.sub.resize(op.dim - 1);
  const double s = 0.5 * n_atoms;
  for (int i = 0; i + 1 < op.dim; ++i) op.sub[i] = Complex(0.5 * ladder(s, i), 0.0);
  return op;
}

SpinOperator spin_y(int n_atoms) {
  require_n_atoms(n_atoms);
  SpinOperator op;
  op.dim = n_atoms + 1;
  op.bandwidth = 1;
  op.diag = Eigen::VectorXd::Zero(op.dim);
  op.sub.resize(op.dim - 1);
  const double s = 0.5 * n_atoms;
  for (int i = 0; i + 1 < op.dim; ++i) op.sub[i] = Complex(0.0, -0.5 * ladder(s, i));
  return op;
}

SpinOperator cd_operator(int n_atoms) {
  require_n_atoms(n_atoms);
  SpinOperator op;
  op.dim = n_atoms + 1;
  op.bandwidth = 1;
  op.diag = Eigen::VectorXd::Zero(op.dim);
  op.sub.resize(op.dim - 1);
  const double s = 0.5 * n_atoms;
  for (int i = 0; i + 1 < op.dim; ++i) {
    const double m = static_cast<double>(i) - s;
    op.sub[i] = Complex(0.0, -0.5 * (2.0 * m + 1.0) * ladder(s, i) / n_atoms);
  }
  return op;
}

}  // namespace bjjcat
