#include "qreduct/experiment.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

// Exit codes: 0 success / satisfied, 2 unsatisfiable verdict, 1 any error.
int main(int argc, char** argv) {
  CLI::App app{"qreduct: quantum transmission network simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute an experiment described by a JSON spec");
  std::string spec_path;
  run->add_option("spec", spec_path, "experiment spec (JSON)")->required();
  std::uint64_t seed = 0;
  auto* seed_opt = run->add_option("--seed", seed, "override the RNG seed");
  int steps = 0;
  auto* steps_opt = run->add_option("--steps", steps, "override the evolution step count");
  std::string out, csv;
  auto* out_opt = run->add_option("--out", out, "write the JSON artifact here");
  auto* csv_opt = run->add_option("--csv", csv, "write the CSV artifact here");
  bool permissive = false;
  run->add_flag("--permissive", permissive, "record infeasible steps instead of halting");
  std::size_t cap = 0;
  auto* cap_opt = run->add_option("--cap", cap, "override the qubit cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    qreduct::ExperimentSpec spec = qreduct::parse_experiment(spec_path);
    if (seed_opt->count()) spec.seed = seed;
    if (steps_opt->count()) {
      if (steps < 1) throw qreduct::Error("--steps must be a positive integer");
      spec.steps = steps;
    }
    if (out_opt->count()) spec.out = out;
    if (csv_opt->count()) spec.csv = csv;
    if (permissive) spec.permissive = true;
    if (cap_opt->count()) spec.cap = cap;

    const qreduct::ExperimentResult result = qreduct::run_experiment(spec);
    std::cout << spec.kind << ": "
              << (result.exit_code == 0       ? "ok"
                  : result.exit_code == 2     ? "unsatisfiable"
                                              : "check failed")
              << "\n";
    if (!spec.out.empty()) std::cout << "wrote " << spec.out << "\n";
    if (!spec.csv.empty()) std::cout << "wrote " << spec.csv << "\n";
    return result.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
