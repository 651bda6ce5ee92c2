#pragma once

// Driven evolution of a Boolean network's quantum state: every step solves
// for the state of minimal distance from the previous one among feasible
// superpositions whose per-node bit probabilities match the drive targets.
// Infeasible prescriptions surface as constraint residuals; satisfiability
// is decided by driving every mismatched pin a half-turn and measuring.

#include "qreduct/network.hpp"
#include "qreduct/trace.hpp"

#include <optional>

namespace qreduct {

struct DriveRotation {
  NodeLabel node;
  double theta0 = 0.0;  // target rho(t) = diag(cos^2, sin^2)(theta0 + omega*t)
  double omega = 1.0;
  double duration = 0.0;
};

struct Hold {
  NodeLabel node;
  int bit = 0;
};

struct DriveSchedule {
  std::vector<DriveRotation> rotations;
  std::vector<Hold> holds;
  double duration() const;
};

struct EvolutionConfig {
  int steps = 2000;
  double residual_tol = tol::residual;
  std::uint64_t seed = 0;
  bool permissive = false;  // keep evolving through infeasible steps
};

// Span of the basis kets of all unpinned consistent assignments; equals the
// joint fixed space of every gate projector and wire projector.
// Errors when the network admits no consistent assignment at all.
Subspace feasible_subspace(const BooleanNetwork& net);

// One constrained step, starting from `prev` (inside `sub`, which must be a
// ket span), toward per-node diagonal reduced-matrix targets. Throws
// InfeasibleError (with the least-squares residual) when no state of `sub`
// meets the targets.
StateVector constrained_step(const StateVector& prev, const std::vector<DensityMatrix>& targets,
                             const Subspace& sub);

// Evolve `initial` (a feasible-subspace state, typically a prepared basis
// ket) under the schedule on a uniform grid of cfg.steps increments.
// Stops at the first step whose residual exceeds cfg.residual_tol unless
// cfg.permissive, in which case the nearest realizable state is taken and
// the run continues to the end.
EvolutionTrace run_evolution(const BooleanNetwork& net, const DriveSchedule& schedule,
                             const EvolutionConfig& cfg, const StateVector& initial);

// Seeded Born-rule measurement in the computational basis.
Assignment measure(const StateVector& state, std::uint64_t seed);

struct SatVerdict {
  enum class Kind { satisfied, unsatisfiable };
  Kind kind = Kind::unsatisfiable;
  std::optional<Assignment> witness;  // measured solution when satisfied
  double final_residual = 0.0;
  std::optional<std::size_t> halted_step;
  std::optional<double> halted_phi;
  std::string detail;
  EvolutionTrace trace;
};

// Decide the network by preparation + driven evolution + measurement.
// Free-input values default to 0 and can be overridden.
SatVerdict solve_sat(const BooleanNetwork& net, const EvolutionConfig& cfg,
                     const Assignment& input_overrides = {});

}  // namespace qreduct
