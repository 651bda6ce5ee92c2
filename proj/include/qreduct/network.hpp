#pragma once

// Reversible Boolean networks: gates given by their admitted bit patterns
// (eigenstate tables), wires that force their two ends to disagree, pinned
// nodes, and classical queries on them (enumeration, propagation,
// verification). Assignments map node labels to bits.

#include "qreduct/hilbert.hpp"
#include "qreduct/trace.hpp"
#include "qreduct/transmission.hpp"

#include <cstdint>
#include <optional>

namespace qreduct {

struct Gate {
  std::string kind;                         // "cnot", "not", "toffoli" or "table"
  std::vector<NodeLabel> nodes;             // ordered roles, first = MSB of a pattern
  std::vector<std::uint32_t> eigenstates;   // admitted patterns over `nodes`

  std::size_t arity() const { return nodes.size(); }
};

// Space-deployed controlled-NOT on (t, u, v, r): v copies t, r = t XOR u.
Gate cnot_gate(const NodeLabel& t, const NodeLabel& u, const NodeLabel& v, const NodeLabel& r);
// Two-node disagreement as a gate (the wire relation in gate form).
Gate not_gate(const NodeLabel& a, const NodeLabel& b);
// Space-deployed Toffoli on (a, b, c, ao, bo, co): ao=a, bo=b, co = c XOR ab.
Gate toffoli_gate(const NodeLabel& a, const NodeLabel& b, const NodeLabel& c,
                  const NodeLabel& ao, const NodeLabel& bo, const NodeLabel& co);
// Arbitrary table; rows are bitstrings over `nodes` (first node = leftmost bit).
Gate table_gate(std::vector<NodeLabel> nodes, const std::vector<std::string>& rows);

struct BooleanNetwork {
  Register reg;
  std::vector<Gate> gates;
  std::vector<Transmission> wires;
  Assignment pins;                    // node -> required bit
  std::vector<NodeLabel> free_inputs; // unconstrained nodes assignable at preparation
};

// Reads QREDUCT_CAP (default 14).
std::size_t register_cap_from_env();

// Validates and assembles a network. cap = 0 means "use the environment cap".
BooleanNetwork make_network(std::vector<NodeLabel> nodes, std::vector<Gate> gates,
                            std::vector<std::pair<NodeLabel, NodeLabel>> wires,
                            Assignment pins, std::vector<NodeLabel> free_inputs,
                            std::size_t cap = 0);

// --- classical queries ------------------------------------------------------

// Basis-ket index of a complete assignment / assignment of a ket index.
std::uint64_t assignment_index(const BooleanNetwork& net, const Assignment& a);
Assignment index_assignment(const BooleanNetwork& net, std::uint64_t idx);

// All complete assignments satisfying gates and wires (and pins when
// respect_pins), in ascending basis-index order.
std::vector<std::uint64_t> consistent_kets(const BooleanNetwork& net, bool respect_pins);
std::vector<Assignment> consistent_assignments(const BooleanNetwork& net, bool respect_pins);

// Complete and satisfies every gate, wire, and pin.
bool verify_solution(const BooleanNetwork& net, const Assignment& a);

// Partial assignments indexed by register position; -1 = undetermined.
using PartialAssignment = std::vector<std::int8_t>;
PartialAssignment partial_from(const BooleanNetwork& net, const Assignment& a);

// Constraint-propagation fixpoint; std::nullopt on contradiction.
std::optional<PartialAssignment> propagate_partial(const BooleanNetwork& net,
                                                   PartialAssignment partial);

// Forward logical propagation from `input` to the unique complete
// assignment it determines. Errors on contradiction and on networks the
// input does not determine (the message lists the undetermined nodes).
Assignment classical_propagate(const BooleanNetwork& net, const Assignment& input);

// Basis ket of the propagated assignment.
StateVector prepare_initial_state(const BooleanNetwork& net, const Assignment& input);

// Kets of the full network register compatible with the gate's table.
Subspace gate_subspace(const Gate& g, const Register& reg);

}  // namespace qreduct
