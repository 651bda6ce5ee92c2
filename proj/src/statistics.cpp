#include "qreduct/statistics.hpp"

#include <cmath>

namespace qreduct {

namespace {

std::vector<std::size_t> swap_permutation(const Register& reg) {
  const std::size_t n = reg.size();
  if (n == 0 || n % 2 != 0)
    throw Error("particle swap: register must hold two equal-size particles");
  const std::size_t m = n / 2;
  std::vector<std::size_t> perm(n);
  for (std::size_t k = 0; k < m; ++k) {
    perm[k] = m + k;  // slot k takes particle 2's qubit k
    perm[m + k] = k;
  }
  return perm;
}

StateVector symmetry_combine(const StateVector& v, double sign, const char* what) {
  LinearOperator p = particle_swap(v.reg());
  Vector out = v.amp() + sign * (p.mat() * v.amp());
  double n = out.norm();
  if (n < tol::zero_norm)
    throw AnnihilatedError(std::string(what) + ": state annihilated");
  out /= n;
  Complex ov = out.dot(v.amp());
  if (std::abs(ov) > tol::zero_norm) out *= ov / std::abs(ov);
  return StateVector(v.reg(), std::move(out));
}

}  // namespace

LinearOperator particle_swap(const Register& reg) {
  return LinearOperator(reg, qubit_permutation_matrix(reg, swap_permutation(reg)));
}

LinearOperator symmetric_projector(const Register& reg) {
  LinearOperator p = particle_swap(reg);
  Matrix m = 0.5 * (Matrix::Identity(p.mat().rows(), p.mat().cols()) + p.mat());
  return LinearOperator(reg, std::move(m));
}

LinearOperator antisymmetric_projector(const Register& reg) {
  LinearOperator p = particle_swap(reg);
  Matrix m = 0.5 * (Matrix::Identity(p.mat().rows(), p.mat().cols()) - p.mat());
  return LinearOperator(reg, std::move(m));
}

StateVector symmetrize(const StateVector& v) { return symmetry_combine(v, 1.0, "symmetrize"); }

StateVector antisymmetrize(const StateVector& v) {
  return symmetry_combine(v, -1.0, "antisymmetrize");
}

double watchdog_check(const std::vector<StateVector>& trajectory, const LinearOperator& op) {
  double worst = 0.0;
  for (const auto& psi : trajectory) {
    if (psi.reg() != op.reg()) throw Error("watchdog: register mismatch");
    worst = std::max(worst, (op.mat() * psi.amp() - psi.amp()).norm());
  }
  return worst;
}

double spatial_density(double k, double x, SpinSector sector) {
  double c = std::cos(k * x);
  return sector == SpinSector::singlet ? c * c : 1.0 - c * c;
}

}  // namespace qreduct
