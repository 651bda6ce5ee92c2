#include "qreduct/transmission.hpp"

#include <algorithm>
#include <cmath>

namespace qreduct {

namespace {

Complex phase_of(Complex z) {
  return std::abs(z) < tol::amplitude_floor ? Complex(1.0, 0.0) : z / std::abs(z);
}

}  // namespace

Subspace symmetric_subspace(const Transmission& t) {
  return Subspace::from_kets(t.reg(), {1, 2});  // |01>, |10>
}

LinearOperator wire_projector(const Transmission& t) {
  Matrix m = Matrix::Zero(4, 4);
  m(1, 1) = 1.0;
  m(2, 2) = 1.0;
  return LinearOperator(t.reg(), std::move(m));
}

StateVector transmission_step(const StateVector& prev, const DensityMatrix& target_rho,
                              const Transmission& t) {
  const Register& reg = prev.reg();
  if (reg.size() != 2 || !reg.contains(t.r) || !reg.contains(t.s))
    throw Error("transmission step: state register must be exactly the wire ends");
  if (!prev.is_normalized(1e-9)) throw Error("transmission step: state not normalized");

  // Amplitude positions of (r=0,s=1) and (r=1,s=0) in the caller's register
  // order, and the two kets outside the wire subspace.
  const std::size_t pr = reg.position_of(t.r);
  std::uint64_t ket01 = 0, ket10 = 0;
  ket10 |= std::uint64_t{1} << (1 - pr);
  ket01 |= std::uint64_t{1} << (1 - reg.position_of(t.s));
  const Complex a = prev.amp()(static_cast<Eigen::Index>(ket01));
  const Complex b = prev.amp()(static_cast<Eigen::Index>(ket10));
  for (std::uint64_t i = 0; i < 4; ++i)
    if (i != ket01 && i != ket10 &&
        std::abs(prev.amp()(static_cast<Eigen::Index>(i))) > tol::amplitude_floor)
      throw Error("transmission step: state outside the wire subspace");

  if (target_rho.reg().size() != 1)
    throw Error("transmission step: target must prescribe a single node");
  const NodeLabel& node = target_rho.reg().node(0);
  if (node != t.r && node != t.s)
    throw Error("transmission step: target node is not a wire end");
  const Matrix& rho = target_rho.mat();
  if (!target_rho.is_hermitian(1e-9) || std::abs(rho.trace() - 1.0) > 1e-9)
    throw Error("transmission step: target is not a unit-trace Hermitian matrix");
  const double offdiag = std::abs(rho(0, 1));
  if (offdiag > tol::residual)
    throw InfeasibleError(
        "transmission step: off-diagonal target cannot be realized in the wire subspace",
        offdiag);

  double p0 = std::clamp(rho(0, 0).real(), 0.0, 1.0);
  double p1 = std::clamp(rho(1, 1).real(), 0.0, 1.0);
  // P(node bit = 0): carried by |01> when the node is r, by |10> when it is s.
  const double qa = node == t.r ? p0 : p1;
  const double qb = node == t.r ? p1 : p0;

  Vector amp = Vector::Zero(4);
  const double scale = std::sqrt(qa + qb);
  amp(static_cast<Eigen::Index>(ket01)) = std::sqrt(qa) / scale * phase_of(a);
  amp(static_cast<Eigen::Index>(ket10)) = std::sqrt(qb) / scale * phase_of(b);
  return StateVector(reg, std::move(amp));
}

EvolutionTrace evolve_transmission(double theta0, double phi_total, int steps) {
  if (steps < 1) throw Error("evolve_transmission: steps must be >= 1");
  Transmission t("r", "s");
  const Register reg = t.reg();

  EvolutionTrace trace;
  trace.reg = reg;
  trace.basis = Matrix::Zero(4, 2);
  trace.basis(1, 0) = 1.0;
  trace.basis(2, 1) = 1.0;
  trace.labels = {"01", "10"};
  trace.basis_kets = std::vector<std::uint64_t>{1, 2};

  Vector amp = Vector::Zero(4);
  amp(1) = std::cos(theta0);
  amp(2) = std::sin(theta0);
  StateVector state(reg, amp);

  const Register reg_r({t.r});
  auto record = [&](double phi, const StateVector& s) {
    const double angle = theta0 + phi;
    Matrix want(2, 2);
    want << std::cos(angle) * std::cos(angle), 0.0, 0.0, std::sin(angle) * std::sin(angle);
    // Residuals of both step conditions: wire-subspace membership and the
    // prescribed reduced matrix. Kept for the trace even though the solver
    // satisfies them by construction.
    const double wire_res = (wire_projector(t).mat() * s.amp() - s.amp()).norm();
    const double rho_res = (partial_trace(s, {t.r}).mat() - want).norm();
    trace.phi.push_back(phi);
    trace.coeff.push_back((Vector(2) << s.amp()(1), s.amp()(2)).finished());
    trace.residual.push_back(std::max(wire_res, rho_res));
  };
  record(0.0, state);

  for (int k = 1; k <= steps; ++k) {
    const double phi = phi_total * k / steps;
    const double angle = theta0 + phi;
    Matrix rho(2, 2);
    rho << std::cos(angle) * std::cos(angle), 0.0, 0.0, std::sin(angle) * std::sin(angle);
    state = transmission_step(state, DensityMatrix(reg_r, rho), t);
    record(phi, state);
  }
  return trace;
}

LinearOperator global_unitary(const Transmission& t, double phi) {
  const double c = std::cos(phi), s = std::sin(phi);
  Matrix m = Matrix::Identity(4, 4);
  m(1, 1) = c;
  m(1, 2) = -s;
  m(2, 1) = s;
  m(2, 2) = c;
  return LinearOperator(t.reg(), std::move(m));
}

DriveFeasibility conflicting_drives(double theta0, double phi_r, double phi_s, int steps) {
  if (steps < 1) throw Error("conflicting_drives: steps must be >= 1");
  DriveFeasibility out;
  Eigen::MatrixXd a(5, 2);
  a << 1, 0, 0, 1, 1, 0, 0, 1, 1, 1;
  const auto qr = a.colPivHouseholderQr();
  for (int k = 0; k <= steps; ++k) {
    const double tau = static_cast<double>(k) / steps;
    const double ar = theta0 + phi_r * tau, as = theta0 + phi_s * tau;
    Eigen::VectorXd b(5);
    b << std::cos(ar) * std::cos(ar), std::sin(ar) * std::sin(ar), std::cos(as) * std::cos(as),
        std::sin(as) * std::sin(as), 1.0;
    Eigen::VectorXd q = qr.solve(b);
    const double res = (a * q - b).norm();
    if (res > out.max_residual) out.max_residual = res;
    if (res > tol::residual && !out.first_infeasible_phi)
      out.first_infeasible_phi = std::max(phi_r, phi_s) * tau;
  }
  out.feasible = !out.first_infeasible_phi.has_value();
  return out;
}

}  // namespace qreduct
