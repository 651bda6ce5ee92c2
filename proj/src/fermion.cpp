#include "qreduct/fermion.hpp"

#include "qreduct/statistics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>

namespace qreduct {

namespace {

constexpr double kSqrt1_2 = 0.70710678118654752440;

Complex phase_of(Complex z) {
  return std::abs(z) < tol::amplitude_floor ? Complex(1.0, 0.0) : z / std::abs(z);
}

// Basis index of the first-quantized register (x1, l1, x2, l2).
Eigen::Index fq(int x1, int l1, int x2, int l2) { return x1 * 8 + l1 * 4 + x2 * 2 + l2; }

}  // namespace

const std::array<FermionMode, 4>& fermion_modes() {
  static const std::array<FermionMode, 4> modes = {
      FermionMode{0, 'r'}, FermionMode{1, 'r'}, FermionMode{0, 's'}, FermionMode{1, 's'}};
  return modes;
}

FockAlgebra::FockAlgebra() {
  for (std::size_t k = 0; k < n_modes; ++k) {
    Matrix a = Matrix::Zero(dim, dim);
    const unsigned pos = static_cast<unsigned>(n_modes - 1 - k);  // bit position, LSB = 0
    for (unsigned idx = 0; idx < dim; ++idx) {
      if (!((idx >> pos) & 1u)) continue;
      const unsigned earlier = idx >> (pos + 1);  // occupations of modes before k
      const double sign = (std::popcount(earlier) & 1) ? -1.0 : 1.0;
      a(idx & ~(1u << pos), idx) = sign;
    }
    annihilate_[k] = a;
    create_[k] = a.adjoint();
  }
}

Vector FockAlgebra::vacuum() {
  Vector v = Vector::Zero(dim);
  v(0) = 1.0;
  return v;
}

Matrix anticommutator(const Matrix& x, const Matrix& y) { return x * y + y * x; }

void validate(const TransmissionEnergies& e) {
  if (!(e.ec > 0.0) || !(e.ed > 0.0))
    throw Error("transmission energies: aligned-spin energies must be positive");
  if (!(std::min(e.ea, e.eb) > std::max(e.ec, e.ed)))
    throw Error("transmission energies: single-site energies must exceed aligned-spin ones");
}

Register two_particle_register() { return Register({"x1", "l1", "x2", "l2"}); }

std::vector<NamedAntisymmetricState> build_antisymmetric_basis() {
  const Register reg = two_particle_register();
  const FockAlgebra alg;
  const auto c = [&](std::size_t k) -> const Matrix& { return alg.creator(k); };
  const Vector vac = FockAlgebra::vacuum();

  std::vector<NamedAntisymmetricState> out;
  auto add = [&](std::string label, Vector first, Vector fock, std::string occ,
                 std::string alias) {
    out.push_back({std::move(label), StateVector(reg, std::move(first)), std::move(fock),
                   std::move(occ), std::move(alias)});
  };

  // Both particles on one site, spin singlet.
  Vector a = Vector::Zero(16);
  a(fq(0, 0, 1, 0)) = kSqrt1_2;
  a(fq(1, 0, 0, 0)) = -kSqrt1_2;
  add("a", a, c(0) * c(1) * vac, "c+(0r) c+(1r) |vac>", "");

  Vector b = Vector::Zero(16);
  b(fq(0, 1, 1, 1)) = kSqrt1_2;
  b(fq(1, 1, 0, 1)) = -kSqrt1_2;
  add("b", b, c(2) * c(3) * vac, "c+(0s) c+(1s) |vac>", "");

  // One particle per site, aligned spins (antisymmetric orbital).
  Vector cc = Vector::Zero(16);
  cc(fq(0, 0, 0, 1)) = kSqrt1_2;
  cc(fq(0, 1, 0, 0)) = -kSqrt1_2;
  add("c", cc, c(0) * c(2) * vac, "c+(0r) c+(0s) |vac>", "|00>");

  Vector d = Vector::Zero(16);
  d(fq(1, 0, 1, 1)) = kSqrt1_2;
  d(fq(1, 1, 1, 0)) = -kSqrt1_2;
  add("d", d, c(1) * c(3) * vac, "c+(1r) c+(1s) |vac>", "|11>");

  // One particle per site, opposite spins: triplet (antisymmetric orbital)
  // and singlet (symmetric orbital).
  Vector ee = Vector::Zero(16);
  ee(fq(0, 0, 1, 1)) = 0.5;
  ee(fq(0, 1, 1, 0)) = -0.5;
  ee(fq(1, 0, 0, 1)) = 0.5;
  ee(fq(1, 1, 0, 0)) = -0.5;
  add("e", ee, kSqrt1_2 * (c(0) * c(3) * vac + c(1) * c(2) * vac),
      "(c+(0r) c+(1s) + c+(1r) c+(0s)) |vac> / sqrt(2)", "(|01>+|10>)/sqrt(2)");

  Vector f = Vector::Zero(16);
  f(fq(0, 0, 1, 1)) = 0.5;
  f(fq(0, 1, 1, 0)) = 0.5;
  f(fq(1, 0, 0, 1)) = -0.5;
  f(fq(1, 1, 0, 0)) = -0.5;
  add("f", f, kSqrt1_2 * (c(0) * c(3) * vac - c(1) * c(2) * vac),
      "(c+(0r) c+(1s) - c+(1r) c+(0s)) |vac> / sqrt(2)", "(|01>-|10>)/sqrt(2)");

  return out;
}

LinearOperator build_h_rs(const TransmissionEnergies& e) {
  validate(e);
  const auto basis = build_antisymmetric_basis();
  const std::array<double, 4> energy = {e.ea, e.eb, e.ec, e.ed};
  Matrix h = Matrix::Zero(16, 16);
  for (std::size_t k = 0; k < 4; ++k) {
    const Vector& v = basis[k].first_quantized.amp();
    h += energy[k] * (v * v.adjoint());
  }
  return LinearOperator(two_particle_register(), std::move(h));
}

Matrix build_h_rs_fock(const TransmissionEnergies& e) {
  validate(e);
  const FockAlgebra alg;
  auto term = [&](std::size_t i, std::size_t j) {
    return alg.creator(i) * alg.creator(j) * alg.annihilator(i) * alg.annihilator(j);
  };
  return -(e.ea * term(0, 1) + e.eb * term(2, 3) + e.ec * term(0, 2) + e.ed * term(1, 3));
}

namespace {

Matrix sector_from(const Matrix& h, bool fock) {
  const auto basis = build_antisymmetric_basis();
  Matrix m(6, 6);
  for (int i = 0; i < 6; ++i) {
    const Vector& vi = fock ? basis[i].fock : basis[i].first_quantized.amp();
    for (int j = 0; j < 6; ++j) {
      const Vector& vj = fock ? basis[j].fock : basis[j].first_quantized.amp();
      m(i, j) = vi.dot(h * vj);
    }
  }
  return m;
}

}  // namespace

Matrix sector_matrix(const LinearOperator& h) {
  if (h.reg() != two_particle_register())
    throw Error("sector matrix: operator must act on the two-particle register");
  return sector_from(h.mat(), false);
}

Matrix sector_matrix_fock(const Matrix& h) {
  if (h.rows() != 16 || h.cols() != 16)
    throw Error("sector matrix: occupation-space operator must be 16x16");
  return sector_from(h, true);
}

std::vector<double> sector_spectrum(const TransmissionEnergies& e) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sector_matrix(build_h_rs(e)));
  std::vector<double> out(6);
  for (int i = 0; i < 6; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

Subspace ground_subspace(const LinearOperator& h) {
  if (!h.is_hermitian()) throw Error("ground subspace: operator must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat());
  const auto& ev = es.eigenvalues();
  const double lo = ev(0);
  const double slack = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  Eigen::Index count = 0;
  while (count < ev.size() && ev(count) <= lo + slack) ++count;
  return Subspace(h.reg(), es.eigenvectors().leftCols(count));
}

Subspace transmission_ground_alias(const TransmissionEnergies& e) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(sector_matrix(build_h_rs(e)));
  const auto& ev = es.eigenvalues();
  const double slack = 1e-9 * std::max(1.0, ev.cwiseAbs().maxCoeff());
  Eigen::Index count = 0;
  while (count < ev.size() && ev(count) <= ev(0) + slack) ++count;
  Matrix cols(4, count);
  for (Eigen::Index k = 0; k < count; ++k)
    cols.col(k) = alias_to_qubits(es.eigenvectors().col(k)).amp();
  return Subspace(Register({"r", "s"}), std::move(cols));
}

StateVector alias_to_qubits(const Vector& sector_coeff) {
  if (sector_coeff.size() != 6) throw Error("alias: expected 6 sector coefficients");
  if (std::abs(sector_coeff(0)) > tol::amplitude_floor ||
      std::abs(sector_coeff(1)) > tol::amplitude_floor)
    throw Error("alias: single-site pair states have no two-qubit reading");
  Vector amp(4);
  amp(0) = sector_coeff(2);
  amp(1) = (sector_coeff(4) + sector_coeff(5)) * kSqrt1_2;
  amp(2) = (sector_coeff(4) - sector_coeff(5)) * kSqrt1_2;
  amp(3) = sector_coeff(3);
  return StateVector(Register({"r", "s"}), std::move(amp));
}

Vector qubits_to_sector(const StateVector& wire_state) {
  if (wire_state.reg().size() != 2) throw Error("alias: wire state must hold two qubits");
  const Vector& amp = wire_state.amp();
  Vector c = Vector::Zero(6);
  c(2) = amp(0);
  c(3) = amp(3);
  c(4) = (amp(1) + amp(2)) * kSqrt1_2;
  c(5) = (amp(1) - amp(2)) * kSqrt1_2;
  return c;
}

StateVector lift_to_first_quantized(const StateVector& wire_state) {
  const Vector c = qubits_to_sector(wire_state);
  const auto basis = build_antisymmetric_basis();
  Vector amp = Vector::Zero(16);
  for (int k = 0; k < 6; ++k) amp += c(k) * basis[static_cast<std::size_t>(k)].first_quantized.amp();
  return StateVector(two_particle_register(), std::move(amp));
}

EvolutionTrace embedded_evolution(double theta0, double phi_total, int steps,
                                  const TransmissionEnergies& e) {
  if (steps < 1) throw Error("embedded_evolution: steps must be >= 1");
  validate(e);

  const Register reg = two_particle_register();
  const Register wire_reg({"r", "s"});

  EvolutionTrace trace;
  trace.reg = reg;
  trace.basis = Matrix::Zero(16, 4);
  trace.labels = {"01", "10", "00", "11"};
  for (std::uint64_t ket = 0; ket < 4; ++ket) {
    const std::size_t col = ket == 1 ? 0 : ket == 2 ? 1 : ket == 0 ? 2 : 3;
    trace.basis.col(static_cast<Eigen::Index>(col)) =
        lift_to_first_quantized(basis_ket(wire_reg, ket)).amp();
  }

  const Matrix a12 = antisymmetric_projector(reg).mat();
  const Matrix h16 = build_h_rs(e).mat();
  // Diagonal number operators: spin-0 and spin-1 population at site r.
  Eigen::VectorXd n_r0 = Eigen::VectorXd::Zero(16), n_r1 = Eigen::VectorXd::Zero(16);
  for (int idx = 0; idx < 16; ++idx) {
    const int x1 = (idx >> 3) & 1, l1 = (idx >> 2) & 1, x2 = (idx >> 1) & 1, l2 = idx & 1;
    n_r0(idx) = (l1 == 0 && x1 == 0 ? 1.0 : 0.0) + (l2 == 0 && x2 == 0 ? 1.0 : 0.0);
    n_r1(idx) = (l1 == 0 && x1 == 1 ? 1.0 : 0.0) + (l2 == 0 && x2 == 1 ? 1.0 : 0.0);
  }

  Complex alpha = std::cos(theta0), beta = std::sin(theta0);
  auto record = [&](double phi) {
    const double angle = theta0 + phi;
    const Vector full = alpha * trace.basis.col(0) + beta * trace.basis.col(1);
    const double anti_res = (a12 * full - full).norm();
    const Eigen::VectorXd prob = full.cwiseAbs2();
    const double c2 = std::cos(angle) * std::cos(angle);
    const double s2 = std::sin(angle) * std::sin(angle);
    const double rho_res =
        std::max(std::abs(n_r0.dot(prob) - c2), std::abs(n_r1.dot(prob) - s2));
    const double energy = full.dot(h16 * full).real();
    const double res = std::max({anti_res, rho_res, energy});
    if (res > tol::residual)
      throw InfeasibleError("embedded_evolution: step conditions violated", res);
    trace.phi.push_back(phi);
    trace.coeff.push_back((Vector(4) << alpha, beta, 0.0, 0.0).finished());
    trace.residual.push_back(res);
  };
  record(0.0);

  for (int k = 1; k <= steps; ++k) {
    const double phi = phi_total * k / steps;
    const double angle = theta0 + phi;
    // Same arithmetic as the wire-level step: magnitudes from the driven
    // reduced matrix, phases carried over from the previous step.
    const double q0 = std::cos(angle) * std::cos(angle);
    const double q1 = std::sin(angle) * std::sin(angle);
    const double scale = std::sqrt(q0 + q1);
    alpha = std::sqrt(q0) / scale * phase_of(alpha);
    beta = std::sqrt(q1) / scale * phase_of(beta);
    record(phi);
  }
  return trace;
}

double malfunction_probability(const StateVector& wire_state) {
  if (wire_state.reg().size() != 2)
    throw Error("malfunction probability: wire state must hold two qubits");
  if (!wire_state.is_normalized(1e-9))
    throw Error("malfunction probability: state not normalized");
  return std::norm(wire_state.amp()(0)) + std::norm(wire_state.amp()(3));
}

double expected_energy(const StateVector& wire_state, const TransmissionEnergies& e) {
  const Vector c = qubits_to_sector(wire_state);
  const Matrix h = sector_matrix(build_h_rs(e));
  return c.dot(h * c).real();
}

double relaxation_time(double sigma, double p_target, std::int64_t n) {
  if (!(sigma > 0.0)) throw Error("relaxation time: rate must be positive");
  if (n < 1) throw Error("relaxation time: need at least one transmission");
  if (!(p_target > 0.0) || !(p_target < 1.0))
    throw Error("relaxation time: target probability must lie strictly inside (0, 1)");
  // 1 - p^(1/n) via expm1 to survive large n without cancellation.
  return -std::log(-std::expm1(std::log(p_target) / static_cast<double>(n))) / sigma;
}

double relaxation_mc_estimate(double sigma, double t, std::int64_t n, std::int64_t samples,
                              std::uint64_t seed) {
  if (!(sigma > 0.0)) throw Error("relaxation estimate: rate must be positive");
  if (t < 0.0) throw Error("relaxation estimate: time must be nonnegative");
  if (n < 1 || samples < 1) throw Error("relaxation estimate: need n >= 1 and samples >= 1");
  const double p = -std::expm1(-sigma * t);
  std::mt19937_64 rng(seed);
  std::int64_t hits = 0;
  for (std::int64_t s = 0; s < samples; ++s) {
    bool all = true;
    for (std::int64_t i = 0; i < n; ++i) {
      const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      if (u >= p) all = false;  // keep draw count fixed regardless of outcome
    }
    if (all) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(samples);
}

}  // namespace qreduct
