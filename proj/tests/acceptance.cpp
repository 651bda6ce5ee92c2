// Acceptance checks for the full pipeline, one printed line per criterion.
// Each criterion recomputes its expectations independently of the code under
// test (closed forms, brute-force enumerations, bisection) and pins explicit
// tolerances. Exit code 0 iff every line is a PASS.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qreduct/evolve.hpp"
#include "qreduct/experiment.hpp"
#include "qreduct/fermion.hpp"
#include "qreduct/network.hpp"
#include "qreduct/statistics.hpp"
#include "qreduct/transmission.hpp"

using namespace qreduct;

namespace {

int failures = 0;

void criterion(int n, const std::string& what, const std::function<bool(std::string&)>& body) {
  std::string note;
  bool ok = false;
  try {
    ok = body(note);
  } catch (const std::exception& e) {
    ok = false;
    note = std::string("exception: ") + e.what();
  }
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << n << ": " << what;
  if (!ok && !note.empty()) std::cout << " [" << note << "]";
  std::cout << "\n";
  if (!ok) ++failures;
}

double urand(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

Complex random_amp(std::mt19937_64& rng) {
  return {2.0 * urand(rng) - 1.0, 2.0 * urand(rng) - 1.0};
}

StateVector wire_state(double theta) {
  Vector v(4);
  v << 0.0, std::cos(theta), std::sin(theta), 0.0;
  return StateVector(Register({"r", "s"}), std::move(v));
}

double elapsed_seconds(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

BooleanNetwork cnot_wire_network() {
  return make_network({"t", "u", "v", "r", "s"}, {cnot_gate("t", "u", "v", "r")}, {{"r", "s"}},
                      {{"u", 1}, {"s", 1}}, {"t"});
}

// Independent root of (1 - exp(-t))^n = p by bisection on a sign change.
double bisect_relaxation(double p, std::int64_t n) {
  const double target = std::log(p);
  auto f = [&](double t) { return static_cast<double>(n) * std::log1p(-std::exp(-t)) - target; };
  double lo = 1e-12, hi = 60.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

int main() {
  const Transmission wire("r", "s");
  std::optional<SweepReport> sweep;

  criterion(1, "a driven wire follows the prescribed endpoint probabilities at every step",
            [&](std::string& note) {
    const auto t0 = std::chrono::steady_clock::now();
    const EvolutionTrace trace = evolve_transmission(0.3, 0.2, 2000);
    const double secs = elapsed_seconds(t0);
    const Matrix proj = wire_projector(wire).mat();
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const StateVector v = trace.state_at(i);
      if ((proj * v.amp() - v.amp()).norm() > 1e-9) {
        note = "left the disagreement subspace at step " + std::to_string(i);
        return false;
      }
      const double a = 0.3 + trace.phi[i];
      Matrix want = Matrix::Zero(2, 2);
      want(0, 0) = std::cos(a) * std::cos(a);
      want(1, 1) = std::sin(a) * std::sin(a);
      if ((partial_trace(v, {"r"}).mat() - want).norm() > 1e-9) {
        note = "driven-end density mismatch at step " + std::to_string(i);
        return false;
      }
    }
    const StateVector fin = trace.final_state();
    // Independently computed cos(0.5), sin(0.5).
    if (std::abs(fin.amplitude("01") - Complex{0.87758256189037272, 0.0}) > 1e-9 ||
        std::abs(fin.amplitude("10") - Complex{0.47942553860420300, 0.0}) > 1e-9) {
      note = "endpoint amplitudes off";
      return false;
    }
    if (secs >= 1.0) {
      note = "took " + std::to_string(secs) + " s";
      return false;
    }
    return true;
  });

  criterion(2, "the undriven end mirrors the driven end without being prescribed",
            [&](std::string& note) {
    const EvolutionTrace trace = evolve_transmission(0.3, 0.2, 2000);
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const double a = 0.3 + trace.phi[i];
      Matrix want = Matrix::Zero(2, 2);
      want(0, 0) = std::sin(a) * std::sin(a);
      want(1, 1) = std::cos(a) * std::cos(a);
      if ((partial_trace(trace.state_at(i), {"s"}).mat() - want).norm() > 1e-9) {
        note = "far-end density mismatch at step " + std::to_string(i);
        return false;
      }
    }
    return true;
  });

  criterion(3, "the whole drive acts as one entangling unitary on the pair",
            [&](std::string& note) {
    std::mt19937_64 rng(2026);
    const Matrix proj = wire_projector(wire).mat();
    for (int it = 0; it < 100; ++it) {
      const double theta = std::numbers::pi * (urand(rng) - 0.5);
      const double phi = 2.0 * std::numbers::pi * (urand(rng) - 0.5);
      const LinearOperator u = global_unitary(wire, phi);
      if (distance(apply(u, wire_state(theta)), wire_state(theta + phi)) > 1e-12) {
        note = "rotation map error";
        return false;
      }
      if ((u.mat() * proj - proj * u.mat()).norm() > 1e-12) {
        note = "does not commute with the wire projector";
        return false;
      }
    }
    if (operator_schmidt_rank(global_unitary(wire, std::numbers::pi / 4), {"r"}) < 2) {
      note = "quarter-turn is not entangling";
      return false;
    }
    return true;
  });

  criterion(4, "driving the mismatched pin rotates the network onto its unique solution",
            [&](std::string& note) {
    EvolutionConfig cfg;
    cfg.steps = 2000;
    const auto t0 = std::chrono::steady_clock::now();
    const SatVerdict verdict = solve_sat(cnot_wire_network(), cfg);
    const double secs = elapsed_seconds(t0);
    if (verdict.kind != SatVerdict::Kind::satisfied) {
      note = "not satisfied";
      return false;
    }
    const Assignment want = {{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 1}};
    if (!verdict.witness || *verdict.witness != want) {
      note = "wrong witness";
      return false;
    }
    for (std::size_t i : {std::size_t{0}, std::size_t{500}, std::size_t{1000}, std::size_t{1500},
                          std::size_t{2000}}) {
      const StateVector v = verdict.trace.state_at(i);
      const double phi = verdict.trace.phi[i];
      if (std::abs(v.amplitude("01010") - Complex{std::cos(phi), 0.0}) > 1e-9 ||
          std::abs(v.amplitude("11101") - Complex{std::sin(phi), 0.0}) > 1e-9) {
        note = "interpolating amplitudes off at step " + std::to_string(i);
        return false;
      }
    }
    if (std::abs(verdict.trace.final_state().amplitude("11101")) < 1.0 - 1e-9) {
      note = "final overlap with the solution ket below 1 - 1e-9";
      return false;
    }
    if (secs >= 1.0) {
      note = "took " + std::to_string(secs) + " s";
      return false;
    }
    return true;
  });

  criterion(5, "the drive verdict matches brute-force enumeration on every small network",
            [&](std::string& note) {
    EvolutionConfig cfg;
    cfg.steps = 24;
    sweep = oracle_equivalence_sweep(5, cfg);
    if (sweep->networks != 2367 || sweep->runs != 445455) {
      note = "unexpected sweep size: " + std::to_string(sweep->networks) + " structures, " +
             std::to_string(sweep->runs) + " runs";
      return false;
    }
    if (sweep->agreements != sweep->runs || !sweep->mismatches.empty()) {
      note = sweep->mismatches.empty() ? "agreement count off" : sweep->mismatches.front();
      return false;
    }
    if (sweep->seconds >= 60.0) {
      note = "took " + std::to_string(sweep->seconds) + " s";
      return false;
    }
    return true;
  });

  criterion(6, "every unsatisfiable run halts on a certified residual, and the tool exits 2",
            [&](std::string& note) {
    if (!sweep) {
      note = "sweep unavailable";
      return false;
    }
    if (sweep->unsat_runs == 0 || sweep->sat_runs + sweep->unsat_runs != sweep->runs) {
      note = "verdict accounting off";
      return false;
    }
    if (sweep->unsat_halted + sweep->unsat_degenerate != sweep->unsat_runs) {
      note = "not every unsatisfiable run was halted or degenerate";
      return false;
    }
    if (sweep->unsat_halted > 0 && !(sweep->min_halt_residual > 1e-9)) {
      note = "weakest halting residual not above tolerance";
      return false;
    }
    const char* bin = std::getenv("QREDUCT_BIN");
    if (bin == nullptr) {
      note = "QREDUCT_BIN not set";
      return false;
    }
    const std::string cmd = std::string("\"") + bin + "\" run \"" + QREDUCT_FIXTURE_DIR +
                            "/wire_unsat_solve.json\" > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 2) {
      note = "command line did not exit with code 2";
      return false;
    }
    return true;
  });

  criterion(7, "the two-fermion carrier has the right algebra, spectrum, and ground pair",
            [&](std::string& note) {
    const FockAlgebra alg;
    const Matrix id = Matrix::Identity(16, 16);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        const double cc = anticommutator(alg.creator(i), alg.creator(j)).norm();
        const double aa = anticommutator(alg.annihilator(i), alg.annihilator(j)).norm();
        const Matrix mixed = anticommutator(alg.creator(i), alg.annihilator(j));
        const double ca = (i == j) ? (mixed - id).norm() : mixed.norm();
        if (cc > 1e-14 || aa > 1e-14 || ca > 1e-14) {
          note = "anticommutator violation";
          return false;
        }
      }
    }
    const std::vector<double> spec = sector_spectrum();
    const std::vector<double> want = {0.0, 0.0, 2.0, 2.0, 3.0, 3.0};
    for (std::size_t i = 0; i < 6; ++i)
      if (std::abs(spec[i] - want[i]) > 1e-12) {
        note = "sector spectrum off";
        return false;
      }
    const Matrix ground = transmission_ground_alias().projector();
    const Matrix disagree = Subspace::from_kets(Register({"r", "s"}), {1, 2}).projector();
    if ((ground - disagree).norm() > 1e-12) {
      note = "ground pair does not alias to the disagreement subspace";
      return false;
    }
    return true;
  });

  criterion(8, "the embedded two-fermion drive reproduces the wire dynamics step by step",
            [&](std::string& note) {
    for (const double theta0 : {0.0, 0.3}) {
      const EvolutionTrace embedded = embedded_evolution(theta0, std::numbers::pi / 2, 2000);
      const EvolutionTrace plain = evolve_transmission(theta0, std::numbers::pi / 2, 2000);
      if (embedded.size() != plain.size()) {
        note = "trace sizes differ";
        return false;
      }
      for (std::size_t i = 0; i < embedded.size(); ++i) {
        const Complex e0 = embedded.coeff[i](0), e1 = embedded.coeff[i](1);
        const Complex p0 = plain.coeff[i](0), p1 = plain.coeff[i](1);
        if (std::abs(std::conj(e0) * p0 + std::conj(e1) * p1) < 1.0 - 1e-9) {
          note = "fidelity dropped at step " + std::to_string(i);
          return false;
        }
        Vector amp(4);
        amp << embedded.coeff[i](2), e0, e1, embedded.coeff[i](3);
        const StateVector state(Register({"r", "s"}), std::move(amp));
        if (expected_energy(state) > 1e-12 || malfunction_probability(state) > 1e-12) {
          note = "embedded state left the ground pair at step " + std::to_string(i);
          return false;
        }
      }
    }
    return true;
  });

  criterion(9, "malfunction probability and energy follow the closed forms on random states",
            [&](std::string& note) {
    std::mt19937_64 rng(7777);
    const TransmissionEnergies e{5.0, 4.0, 1.5, 2.5};
    for (int it = 0; it < 1000; ++it) {
      Vector amp(4);
      for (int k = 0; k < 4; ++k) amp(k) = random_amp(rng);
      amp /= amp.norm();
      const StateVector v(Register({"r", "s"}), std::move(amp));
      const double p00 = std::norm(v.amplitude("00")), p11 = std::norm(v.amplitude("11"));
      if (std::abs(malfunction_probability(v) - (p00 + p11)) > 1e-12) {
        note = "malfunction probability off";
        return false;
      }
      if (std::abs(expected_energy(v, e) - (p00 * e.ec + p11 * e.ed)) > 1e-12) {
        note = "expected energy off";
        return false;
      }
    }
    return true;
  });

  criterion(10, "relaxation deadlines match bisection and grow sublinearly in the wire count",
            [&](std::string& note) {
    const std::vector<std::int64_t> counts = {1, 10, 100, 1000, 10000, 100000, 1000000};
    double prev_t = 0.0;
    std::int64_t prev_n = 0;
    for (const std::int64_t n : counts) {
      const double t = relaxation_time(1.0, 0.9, n);
      const double ref = bisect_relaxation(0.9, n);
      if (std::abs(t - ref) > 1e-10) {
        note = "closed form departs from bisection at n = " + std::to_string(n);
        return false;
      }
      if (n > 1) {
        if (!(t > prev_t)) {
          note = "deadline not increasing at n = " + std::to_string(n);
          return false;
        }
        const double ratio = t / prev_t;
        if (!(ratio < static_cast<double>(n) / static_cast<double>(prev_n))) {
          note = "deadline grew superlinearly at n = " + std::to_string(n);
          return false;
        }
      }
      prev_t = t;
      prev_n = n;
    }
    return true;
  });

  criterion(11, "exchange-sector densities and projections obey the closed identities",
            [&](std::string& note) {
    std::mt19937_64 rng(4242);
    const Complex i01(0.0, 1.0);
    for (int it = 0; it < 100; ++it) {
      const double ka = 6.0 * urand(rng) - 3.0, kb = 6.0 * urand(rng) - 3.0;
      const double x1 = 10.0 * urand(rng) - 5.0, x2 = 10.0 * urand(rng) - 5.0;
      const Complex sym = std::exp(i01 * ka * x1) * std::exp(i01 * kb * x2) +
                          std::exp(i01 * ka * x2) * std::exp(i01 * kb * x1);
      const Complex asym = std::exp(i01 * ka * x1) * std::exp(i01 * kb * x2) -
                           std::exp(i01 * ka * x2) * std::exp(i01 * kb * x1);
      const double k = 0.5 * (ka - kb), x = x1 - x2;
      if (std::abs(spatial_density(k, x, SpinSector::singlet) - std::norm(sym) / 4) > 1e-12 ||
          std::abs(spatial_density(k, x, SpinSector::triplet) - std::norm(asym) / 4) > 1e-12) {
        note = "plane-wave density mismatch";
        return false;
      }
    }
    const Register pair({"p1", "p2"});
    const Matrix sym_proj = symmetric_projector(pair).mat();
    const Matrix anti_proj = antisymmetric_projector(pair).mat();
    for (int it = 0; it < 1000; ++it) {
      Vector amp(4);
      for (int k = 0; k < 4; ++k) amp(k) = random_amp(rng);
      amp /= amp.norm();
      const StateVector v(pair, std::move(amp));
      const StateVector s = symmetrize(v);
      const StateVector a = antisymmetrize(v);
      if (distance(symmetrize(s), s) > 1e-12 || distance(antisymmetrize(a), a) > 1e-12) {
        note = "projection not idempotent";
        return false;
      }
      if ((anti_proj * s.amp()).norm() > 1e-12 || (sym_proj * a.amp()).norm() > 1e-12) {
        note = "sectors not mutually annihilated";
        return false;
      }
      try {
        antisymmetrize(s);
        note = "antisymmetrizing a symmetric state did not annihilate it";
        return false;
      } catch (const AnnihilatedError&) {
      }
    }
    return true;
  });

  if (failures == 0)
    std::cout << "all criteria passed\n";
  else
    std::cout << failures << " criteria failed\n";
  return failures == 0 ? 0 : 1;
}
