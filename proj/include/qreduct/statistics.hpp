#pragma once

// Two-particle exchange symmetry: swap operators, (anti)symmetrizers, the
// watchdog residual of a trajectory under a continuously enforced projector,
// and the closed-form spatial densities of two opposite plane waves.

#include "qreduct/hilbert.hpp"

namespace qreduct {

// P_12 on a register holding two particles of m qubits each (first half of
// the register = particle 1). Unitary, Hermitian, squares to the identity.
LinearOperator particle_swap(const Register& two_particle_reg);

// True projectors (1 ± P_12)/2.
LinearOperator symmetric_projector(const Register& two_particle_reg);
LinearOperator antisymmetric_projector(const Register& two_particle_reg);

// (1 + P_12) v, renormalized, phase aligned with v.
// AnnihilatedError when v is purely antisymmetric.
StateVector symmetrize(const StateVector& v);

// (1 - P_12) v, renormalized, phase aligned with v.
// AnnihilatedError when v is purely symmetric.
StateVector antisymmetrize(const StateVector& v);

// Largest deviation max_t || op psi_t - psi_t || of a trajectory from being
// pointwise fixed by `op`. Zero means the watchdog never fires.
double watchdog_check(const std::vector<StateVector>& trajectory, const LinearOperator& op);

enum class SpinSector { singlet, triplet };

// Relative spatial density of two opposite plane waves at relative
// coordinate x, half-wavenumber-difference k: cos^2(kx) for the singlet
// (symmetric orbital), sin^2(kx) for the triplet (antisymmetric orbital),
// normalized so the two sectors sum to 1.
double spatial_density(double k, double x, SpinSector sector);

}  // namespace qreduct
