#pragma once

// A wire between two Boolean nodes, realized as the two-qubit subspace in
// which the nodes always disagree, and the driven dynamics on it: per-step
// states of minimal distance from the previous step subject to (i) staying
// in the wire subspace and (ii) a prescribed diagonal reduced density
// matrix on one end.

#include "qreduct/hilbert.hpp"
#include "qreduct/trace.hpp"

#include <optional>

namespace qreduct {

struct Transmission {
  NodeLabel r, s;
  Transmission(NodeLabel r_, NodeLabel s_) : r(std::move(r_)), s(std::move(s_)) {
    if (r == s) throw Error("transmission: endpoints must differ");
  }
  Register reg() const { return Register({r, s}); }
};

// span{|01>, |10>} on the register (r, s).
Subspace symmetric_subspace(const Transmission& t);

// The projector onto symmetric_subspace(t): diag(0, 1, 1, 0).
LinearOperator wire_projector(const Transmission& t);

// One constrained step. `prev` must lie in the wire subspace (within the
// amplitude floor) and be normalized; `target_rho` prescribes the diagonal
// reduced density matrix of the single node named by its register (either
// end of t). Magnitudes come from the target, phases follow the previous
// amplitudes; amplitudes reborn from zero take relative phase 0.
// InfeasibleError when target_rho has off-diagonal weight (no state of the
// wire subspace can realize it).
StateVector transmission_step(const StateVector& prev, const DensityMatrix& target_rho,
                              const Transmission& t);

// Drive the canonical wire ("r","s") prepared in cos(theta0)|01> +
// sin(theta0)|10> by a rotation of total angle phi_total on node r, in
// `steps` equal increments. Records every step, including the initial one.
EvolutionTrace evolve_transmission(double theta0, double phi_total, int steps);

// The unitary that reproduces the driven wire evolution as a whole: rotation
// by phi on the ordered basis (|01>, |10>), identity on span{|00>, |11>}.
LinearOperator global_unitary(const Transmission& t, double phi);

struct DriveFeasibility {
  bool feasible = true;
  double max_residual = 0.0;
  std::optional<double> first_infeasible_phi;
};

// Drive both ends simultaneously, r by phi_r and s by phi_s (completing
// together). Feasible iff the two prescriptions agree, i.e. phi_r == phi_s
// within step tolerance; otherwise reports the largest constraint residual
// and where it first exceeded tolerance.
DriveFeasibility conflicting_drives(double theta0, double phi_r, double phi_s, int steps = 256);

}  // namespace qreduct
