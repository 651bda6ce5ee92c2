#pragma once

// Batch experiment runner: JSON network files, named experiment kinds with
// deterministic JSON/CSV artifacts, and the exhaustive small-network sweep
// comparing the evolution verdict against the classical enumeration oracle.

#include "qreduct/evolve.hpp"
#include "qreduct/network.hpp"

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace qreduct {

// --- network files -----------------------------------------------------------
//
// Schema (JSON object):
//   nodes        [string, ...]            required, nonempty, distinct
//   gates        [{type, nodes, rows?}]   type: "cnot" | "not" | "toffoli" | "table";
//                                         "table" takes rows: ["0101", ...]
//   wires        [[r, s], ...]            node label pairs
//   pins         {node: 0|1, ...}
//   free_inputs  [string, ...]
// All sections except nodes are optional. Labels must refer to declared nodes.

BooleanNetwork parse_network(const std::string& path, std::size_t cap = 0);
BooleanNetwork parse_network_text(const std::string& text, std::size_t cap = 0);

// Canonical single-line JSON; parse_network_text(emit_network(n)) rebuilds n.
std::string emit_network(const BooleanNetwork& net);

// --- experiment specs ----------------------------------------------------------
//
// Spec file schema: {kind, network?, inputs?, seed?, steps?, out?, csv?,
// permissive?, cap?, params?}. `params` holds kind-specific numbers; unknown
// keys are rejected. Paths inside the file resolve relative to the file.

struct ExperimentSpec {
  std::string kind;
  std::string network;  // resolved path; required by sat-solve only
  Assignment inputs;    // free-input overrides for sat-solve
  std::uint64_t seed = 0;
  int steps = 2000;
  std::string out;  // JSON artifact path; empty = do not write
  std::string csv;  // CSV artifact path; empty = do not write
  bool permissive = false;
  std::size_t cap = 0;  // 0 = QREDUCT_CAP / default
  std::map<std::string, double> params;
};

extern const std::vector<std::string> kExperimentKinds;

ExperimentSpec parse_experiment(const std::string& path);

struct ExperimentResult {
  int exit_code = 0;  // 0 ok / satisfied, 2 unsatisfiable (errors are thrown)
  std::string json;   // artifact text, also written to spec.out when set
  std::string csv;    // plot columns when the kind produces them
};

// Deterministic for a fixed spec: identical bytes in and out.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// --- oracle-equivalence sweep ---------------------------------------------------
//
// Exhaustive family over at most `max_nodes` (2..5) labeled nodes:
//   (a) every nonempty set of wires (unordered node pairs); the network's
//       nodes are the covered ones;
//   (b) one controlled-NOT gate in each of the 24 role orderings over four
//       nodes, plus every choice of at most two extra wires (max_nodes >= 4).
// Every structure runs under every pin pattern (each node unpinned, pinned
// 0, or pinned 1). The evolution verdict must match the enumeration oracle
// run for run, and satisfied witnesses must be oracle solutions.

struct SweepReport {
  std::size_t networks = 0;  // distinct structures
  std::size_t runs = 0;      // structure x pin-pattern instances
  std::size_t agreements = 0;
  std::vector<std::string> mismatches;  // human-readable, empty on success

  std::size_t sat_runs = 0;
  std::size_t unsat_runs = 0;
  std::size_t unsat_halted = 0;      // halted on a step residual > tolerance
  std::size_t unsat_degenerate = 0;  // no consistent assignment even unpinned
  double min_halt_residual = std::numeric_limits<double>::infinity();
  double seconds = 0.0;  // wall time; not serialized (artifacts stay deterministic)
};

SweepReport oracle_equivalence_sweep(std::size_t max_nodes, const EvolutionConfig& cfg);

}  // namespace qreduct
