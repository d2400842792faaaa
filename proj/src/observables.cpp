#include "bjjcat/observables.hpp"

#include <cmath>

namespace bjjcat {

double sz_mean(const Vector& psi) {
  const double s = 0.5 * (psi.size() - 1);
  double acc = 0.0;
  for (int i = 0; i < psi.size(); ++i) acc += (static_cast<double>(i) - s) * std::norm(psi[i]);
  return acc;
}

double sz_second_moment(const Vector& psi) {
  const double s = 0.5 * (psi.size() - 1);
  double acc = 0.0;
  for (int i = 0; i < psi.size(); ++i) {
    const double m = static_cast<double>(i) - s;
    acc += m * m * std::norm(psi[i]);
  }
  return acc;
}

double subspace_fidelity(const Vector& psi, const GroundSubspace& sub) {
  double acc = 0.0;
  for (const auto& v : sub.vectors) acc += std::norm(v.dot(psi));
  return acc;
}

double residual_energy(const Vector& psi, const SpinOperator& h_final, double coupling, int n_atoms) {
  return h_final.expectation(psi) + 0.5 * coupling * n_atoms;
}

double order_parameter(const Vector& psi, int n_atoms) {
  const double s = 0.5 * n_atoms;
  return std::sqrt(sz_second_moment(psi)) / s;
}

double incomplete_magnetization(const Vector& psi, int n_atoms) {
  return 1.0 - order_parameter(psi, n_atoms);
}

double quantum_fisher_information(const Vector& psi) {
  const double m1 = sz_mean(psi);
  return 4.0 * (sz_second_moment(psi) - m1 * m1);
}

}  // namespace bjjcat
