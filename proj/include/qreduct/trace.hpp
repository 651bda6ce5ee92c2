#pragma once

// Time-indexed record of a constrained evolution. States are stored as
// coefficient rows over a small orthonormal recording basis (the feasible
// kets of a network run, or the wire/alias basis of a transmission run), so
// long runs stay cheap; full state vectors are materialized on demand.

#include "qreduct/hilbert.hpp"

#include <map>
#include <optional>

namespace qreduct {

using Assignment = std::map<NodeLabel, int>;

struct EvolutionTrace {
  Register reg;
  Matrix basis;                     // dim x k, orthonormal columns
  std::vector<std::string> labels;  // one per basis column
  std::optional<std::vector<std::uint64_t>> basis_kets;  // set when columns are kets

  std::vector<double> phi;        // drive angle at each recorded step
  std::vector<Vector> coeff;      // coefficients over `basis` at each step
  std::vector<double> residual;   // constraint residual at each step

  bool feasible = true;
  std::optional<std::size_t> halted_step;  // first step whose residual exceeded tolerance
  std::optional<Assignment> measurement;

  std::size_t size() const { return coeff.size(); }
  StateVector state_at(std::size_t i) const;
  const StateVector final_state() const { return state_at(size() - 1); }
};

}  // namespace qreduct
