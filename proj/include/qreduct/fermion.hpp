#pragma once

// Two identical spin-1/2 fermions on two sites (r, s) as the physical carrier
// of a wire: creation/annihilation operators on the 16-dim occupation space,
// the six antisymmetric two-particle states, the transmission Hamiltonian
// whose ground pair aliases to span{|01>, |10>}, the adiabatic embedded
// evolution, and malfunction / relaxation analysis.

#include "qreduct/hilbert.hpp"
#include "qreduct/trace.hpp"

#include <array>
#include <cstdint>

namespace qreduct {

// A single-particle mode: spin chi (0 down / 1 up) at site 'r' or 's'.
struct FermionMode {
  int chi;
  char site;
};

// The four modes in the fixed order (0r, 1r, 0s, 1s). This order also fixes
// the sign bookkeeping of the operator algebra below.
const std::array<FermionMode, 4>& fermion_modes();

// Creation/annihilation matrices on the 16-dim occupation basis. Basis index
// bits follow the mode order with the first mode (0r) most significant;
// index 0 is the vacuum. Signs use the standard ordered-product convention:
// annihilating mode k picks up (-1)^(number of occupied earlier modes).
class FockAlgebra {
 public:
  static constexpr std::size_t n_modes = 4;
  static constexpr std::size_t dim = 16;

  FockAlgebra();

  const Matrix& creator(std::size_t mode) const { return create_.at(mode); }
  const Matrix& annihilator(std::size_t mode) const { return annihilate_.at(mode); }
  static Vector vacuum();

 private:
  std::array<Matrix, n_modes> create_, annihilate_;
};

Matrix anticommutator(const Matrix& x, const Matrix& y);

// Energies of the four excited antisymmetric states, in units of the energy
// gap. The defaults are the smallest integers with the required ordering:
// both single-site energies strictly above both aligned-spin energies,
// everything strictly positive.
struct TransmissionEnergies {
  double ea = 3.0;
  double eb = 3.0;
  double ec = 2.0;
  double ed = 2.0;
};

// Error unless min(ea, eb) > max(ec, ed) > 0 and min(ec, ed) > 0.
void validate(const TransmissionEnergies& e);

// First-quantized register (x1, l1, x2, l2): spin and site of each particle,
// site bit 0 = r, 1 = s. Particle 1 occupies the first half, so the exchange
// operators of statistics.hpp apply directly.
Register two_particle_register();

// One of the six two-particle states compatible with antisymmetry, in every
// representation the library uses.
struct NamedAntisymmetricState {
  std::string label;            // "a" .. "f"
  StateVector first_quantized;  // on two_particle_register()
  Vector fock;                  // 16-dim occupation-basis vector
  std::string occupation;       // creation-operator form, for display
  std::string qubit_alias;      // two-qubit reading; empty for "a", "b"
};

// The six states: a, b (both particles on one site), c, d (one per site,
// aligned spins -> |00>, |11>), e, f (one per site, (|01> +- |10>)/sqrt(2)).
// Orthonormal in both representations; order fixed as listed.
std::vector<NamedAntisymmetricState> build_antisymmetric_basis();

// Transmission Hamiltonian as a projector sum on the first-quantized space:
// ea |a><a| + eb |b><b| + ec |c><c| + ed |d><d|.
LinearOperator build_h_rs(const TransmissionEnergies& e = {});

// The same Hamiltonian in its occupation-operator product form
// -(ea c+(0r) c+(1r) a(0r) a(1r) + ...) on the 16-dim occupation space.
Matrix build_h_rs_fock(const TransmissionEnergies& e = {});

// 6x6 matrix elements <x|h|y> over the named states (order a..f), in the
// first-quantized and occupation representations respectively.
Matrix sector_matrix(const LinearOperator& h);
Matrix sector_matrix_fock(const Matrix& h);

// Eigenvalues of the antisymmetric-sector Hamiltonian, ascending:
// {0, 0, ec, ed, ea, eb} up to ordering.
std::vector<double> sector_spectrum(const TransmissionEnergies& e = {});

// Eigenspace of the smallest eigenvalue of a Hermitian operator.
Subspace ground_subspace(const LinearOperator& h);

// The ground pair of the sector Hamiltonian, mapped through the qubit alias:
// a subspace of the two-qubit register ("r", "s"). Equals span{|01>, |10>}
// for any valid energies.
Subspace transmission_ground_alias(const TransmissionEnergies& e = {});

// Coordinate maps between the named-state sector (coefficients over a..f)
// and two-qubit wire states. Only states with no weight on "a", "b" have a
// qubit reading; alias_to_qubits errors otherwise. Both maps preserve norm.
StateVector alias_to_qubits(const Vector& sector_coeff);
Vector qubits_to_sector(const StateVector& wire_state);

// Antisymmetric 16-dim representative of a two-qubit wire state.
StateVector lift_to_first_quantized(const StateVector& wire_state);

// The driven wire dynamics carried out in the two-particle space: per step,
// the state of minimal distance from the previous one that is antisymmetric,
// has minimal expected energy, and realizes the prescribed reduced matrix of
// qubit r. Residuals of all three conditions are recorded per step; the
// trace basis columns are the lifted |01>, |10>, |00>, |11>, so coefficient
// rows read directly as wire amplitudes.
EvolutionTrace embedded_evolution(double theta0, double phi_total, int steps,
                                  const TransmissionEnergies& e = {});

// Probability that measuring a wire state finds the ends equal (|00> or
// |11>), i.e. the transmission has failed.
double malfunction_probability(const StateVector& wire_state);

// <state| H |state> through the sector Hamiltonian; equals
// |amp(00)|^2 ec + |amp(11)|^2 ed for wire states.
double expected_energy(const StateVector& wire_state, const TransmissionEnergies& e = {});

// Time until n independent transmissions, each relaxing to ground with
// probability 1 - exp(-sigma t), are all found on ground with probability
// p_target: t = -ln(1 - p_target^(1/n)) / sigma.
double relaxation_time(double sigma, double p_target, std::int64_t n);

// Monte Carlo check of the same quantity: fraction of `samples` trials in
// which all n transmissions are on ground at time t. Deterministic in seed.
double relaxation_mc_estimate(double sigma, double t, std::int64_t n, std::int64_t samples,
                              std::uint64_t seed);

}  // namespace qreduct
