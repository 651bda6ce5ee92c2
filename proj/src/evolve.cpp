#include "qreduct/evolve.hpp"

#include "qreduct/lsq.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <unordered_map>

namespace qreduct {

namespace {

// Grouping of feasible kets by their bit pattern over the scheduled nodes,
// with the (#scheduled + 1) x #groups indicator system the step solves.
struct StepSystem {
  std::vector<std::size_t> scheduled_positions;
  std::vector<int> group_of;                  // ket slot -> group
  std::vector<std::vector<int>> members;      // group -> ket slots
  Eigen::MatrixXd a;                          // indicators + normalization row

  StepSystem(const Register& reg, const std::vector<std::uint64_t>& kets,
             const std::vector<NodeLabel>& scheduled) {
    for (const auto& node : scheduled) scheduled_positions.push_back(reg.position_of(node));
    std::unordered_map<std::uint64_t, int> pattern_group;
    group_of.resize(kets.size());
    for (std::size_t j = 0; j < kets.size(); ++j) {
      std::uint64_t pattern = 0;
      for (std::size_t p : scheduled_positions)
        pattern = (pattern << 1) | static_cast<std::uint64_t>(reg.bit(kets[j], p));
      auto [it, fresh] = pattern_group.try_emplace(pattern, static_cast<int>(members.size()));
      if (fresh) members.emplace_back();
      group_of[j] = it->second;
      members[static_cast<std::size_t>(it->second)].push_back(static_cast<int>(j));
    }
    a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(scheduled.size()) + 1,
                              static_cast<Eigen::Index>(members.size()));
    for (std::size_t j = 0; j < kets.size(); ++j)
      for (std::size_t row = 0; row < scheduled_positions.size(); ++row)
        if (reg.bit(kets[j], scheduled_positions[row]) == 1)
          a(static_cast<Eigen::Index>(row), group_of[j]) = 1.0;
    a.row(static_cast<Eigen::Index>(scheduled.size())).setOnes();
  }

  std::size_t groups() const { return members.size(); }
};

struct StepOutcome {
  Vector coeff;
  double residual = 0.0;
};

// One constrained increment over the feasible coefficients. b holds the
// prescribed P(node=1) per scheduled node plus the unit-norm row.
StepOutcome solve_step(const StepSystem& sys, const Vector& prev, const Eigen::VectorXd& b) {
  const std::size_t g = sys.groups();
  Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(g));
  for (std::size_t j = 0; j < static_cast<std::size_t>(prev.size()); ++j)
    mass(sys.group_of[j]) += std::norm(prev(static_cast<Eigen::Index>(j)));

  Eigen::VectorXd q_fit = lsq::nnls(sys.a, b);
  StepOutcome out;
  out.residual = (sys.a * q_fit - b).norm();
  // Among all least-squares-optimal mass vectors, stay closest to the
  // previous step (the optimal face is {q >= 0 : A q = A q_fit}).
  Eigen::VectorXd q = lsq::project_to_face(sys.a, sys.a * q_fit, mass, q_fit);

  out.coeff = Vector::Zero(prev.size());
  for (std::size_t k = 0; k < g; ++k) {
    const double qg = std::max(q(static_cast<Eigen::Index>(k)), 0.0);
    const double mg = mass(static_cast<Eigen::Index>(k));
    if (std::sqrt(mg) >= tol::amplitude_floor) {
      // Surviving group: scale members together; phases ride along.
      const double scale = std::sqrt(qg / mg);
      for (int j : sys.members[k]) out.coeff(j) = prev(j) * scale;
    } else if (qg > 0.0) {
      // Group reborn from nothing: uniform split, relative phase 0.
      const double amp = std::sqrt(qg / static_cast<double>(sys.members[k].size()));
      for (int j : sys.members[k]) out.coeff(j) = amp;
    }
  }
  const double n = out.coeff.norm();
  if (n > tol::zero_norm) out.coeff /= n;
  return out;
}

Eigen::VectorXd targets_at(const DriveSchedule& schedule, double t) {
  Eigen::VectorXd b(static_cast<Eigen::Index>(schedule.rotations.size() + schedule.holds.size()) + 1);
  Eigen::Index row = 0;
  for (const auto& rot : schedule.rotations) {
    const double angle = rot.theta0 + rot.omega * std::min(t, rot.duration);
    const double s = std::sin(angle);
    b(row++) = s * s;  // P(node = 1)
  }
  for (const auto& hold : schedule.holds) b(row++) = static_cast<double>(hold.bit);
  b(row) = 1.0;
  return b;
}

std::vector<NodeLabel> scheduled_nodes(const DriveSchedule& schedule) {
  std::vector<NodeLabel> nodes;
  for (const auto& r : schedule.rotations) nodes.push_back(r.node);
  for (const auto& h : schedule.holds) {
    if (h.bit != 0 && h.bit != 1) throw Error("hold bit must be 0 or 1");
    nodes.push_back(h.node);
  }
  std::set<NodeLabel> seen;
  for (const auto& n : nodes)
    if (!seen.insert(n).second) throw Error("node '" + n + "' is scheduled twice");
  return nodes;
}

}  // namespace

double DriveSchedule::duration() const {
  double d = 0.0;
  for (const auto& r : rotations) {
    if (r.duration < 0.0) throw Error("drive duration must be nonnegative");
    d = std::max(d, r.duration);
  }
  return d;
}

Subspace feasible_subspace(const BooleanNetwork& net) {
  auto kets = consistent_kets(net, false);
  if (kets.empty())
    throw Error("feasible subspace is empty: the network admits no consistent assignment");
  return Subspace::from_kets(net.reg, std::move(kets));
}

StateVector constrained_step(const StateVector& prev, const std::vector<DensityMatrix>& targets,
                             const Subspace& sub) {
  if (prev.reg() != sub.reg()) throw Error("constrained step: register mismatch");
  if (!sub.kets()) throw Error("constrained step: subspace must be a basis-ket span");
  if (!sub.contains(prev, 1e-9)) throw Error("constrained step: state escapes the subspace");

  const auto& kets = *sub.kets();
  std::vector<NodeLabel> nodes;
  Eigen::VectorXd b(static_cast<Eigen::Index>(targets.size()) + 1);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& rho = targets[i];
    if (rho.reg().size() != 1) throw Error("constrained step: targets must be single-node");
    if (!rho.is_hermitian(1e-9) || std::abs(rho.trace() - 1.0) > 1e-9)
      throw Error("constrained step: target is not a unit-trace Hermitian matrix");
    if (std::abs(rho.mat()(0, 1)) > tol::residual)
      throw Error("constrained step: targets must be diagonal");
    nodes.push_back(rho.reg().node(0));
    b(static_cast<Eigen::Index>(i)) = std::clamp(rho.mat()(1, 1).real(), 0.0, 1.0);
  }
  b(static_cast<Eigen::Index>(targets.size())) = 1.0;
  {
    std::set<NodeLabel> seen(nodes.begin(), nodes.end());
    if (seen.size() != nodes.size()) throw Error("constrained step: duplicate target node");
  }

  StepSystem sys(prev.reg(), kets, nodes);
  Vector prev_coeff(static_cast<Eigen::Index>(kets.size()));
  for (std::size_t j = 0; j < kets.size(); ++j)
    prev_coeff(static_cast<Eigen::Index>(j)) = prev.amp()(static_cast<Eigen::Index>(kets[j]));

  StepOutcome step = solve_step(sys, prev_coeff, b);
  if (step.residual > tol::residual) {
    std::ostringstream os;
    os << "constrained step is infeasible (residual " << step.residual << ")";
    throw InfeasibleError(os.str(), step.residual);
  }
  Vector amp = Vector::Zero(prev.amp().size());
  for (std::size_t j = 0; j < kets.size(); ++j)
    amp(static_cast<Eigen::Index>(kets[j])) = step.coeff(static_cast<Eigen::Index>(j));
  return StateVector(prev.reg(), std::move(amp));
}

EvolutionTrace run_evolution(const BooleanNetwork& net, const DriveSchedule& schedule,
                             const EvolutionConfig& cfg, const StateVector& initial) {
  if (cfg.steps < 1) throw Error("evolution: steps must be >= 1");
  if (initial.reg() != net.reg) throw Error("evolution: initial state register mismatch");
  if (!initial.is_normalized(1e-9)) throw Error("evolution: initial state not normalized");
  for (const auto& node : scheduled_nodes(schedule))
    if (!net.reg.contains(node)) throw Error("schedule references unknown node '" + node + "'");

  auto kets = consistent_kets(net, false);
  if (kets.empty())
    throw Error("feasible subspace is empty: the network admits no consistent assignment");

  EvolutionTrace trace;
  trace.reg = net.reg;
  trace.basis = Matrix::Zero(static_cast<Eigen::Index>(net.reg.dim()),
                             static_cast<Eigen::Index>(kets.size()));
  for (std::size_t j = 0; j < kets.size(); ++j) {
    trace.basis(static_cast<Eigen::Index>(kets[j]), static_cast<Eigen::Index>(j)) = 1.0;
    trace.labels.push_back(net.reg.bitstring(kets[j]));
  }
  trace.basis_kets = kets;

  Vector coeff(static_cast<Eigen::Index>(kets.size()));
  double outside = 0.0;
  {
    Vector rest = initial.amp();
    for (std::size_t j = 0; j < kets.size(); ++j) {
      coeff(static_cast<Eigen::Index>(j)) = initial.amp()(static_cast<Eigen::Index>(kets[j]));
      rest(static_cast<Eigen::Index>(kets[j])) = 0.0;
    }
    outside = rest.norm();
  }
  if (outside > 1e-9) throw Error("evolution: initial state leaves the feasible subspace");

  StepSystem sys(net.reg, kets, scheduled_nodes(schedule));
  const double total = schedule.duration();

  auto record = [&](double phi, const Vector& c, double residual) {
    trace.phi.push_back(phi);
    trace.coeff.push_back(c);
    trace.residual.push_back(residual);
  };

  // Residual of the initial state against the targets at t = 0.
  {
    Eigen::VectorXd mass = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.groups()));
    for (std::size_t j = 0; j < kets.size(); ++j)
      mass(sys.group_of[j]) += std::norm(coeff(static_cast<Eigen::Index>(j)));
    const double res0 = (sys.a * mass - targets_at(schedule, 0.0)).norm();
    record(0.0, coeff, res0);
    if (res0 > cfg.residual_tol) {
      trace.feasible = false;
      trace.halted_step = 0;
      if (!cfg.permissive) return trace;
    }
  }

  if (total <= 0.0) return trace;  // zero-length schedule: just the initial state

  for (int k = 1; k <= cfg.steps; ++k) {
    const double t = total * k / cfg.steps;
    StepOutcome step = solve_step(sys, coeff, targets_at(schedule, t));
    coeff = step.coeff;
    record(t, coeff, step.residual);
    if (step.residual > cfg.residual_tol && trace.feasible) {
      trace.feasible = false;
      trace.halted_step = static_cast<std::size_t>(trace.size() - 1);
      if (!cfg.permissive) break;
    }
  }
  return trace;
}

Assignment measure(const StateVector& state, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // 53 uniform bits; avoids distribution objects so results are identical
  // across standard libraries.
  const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double total = state.amp().squaredNorm();
  if (total < tol::zero_norm) throw Error("measure: state has no weight");

  double acc = 0.0;
  std::uint64_t picked = 0;
  for (std::uint64_t idx = 0; idx < state.reg().dim(); ++idx) {
    const double w = std::norm(state.amp()(static_cast<Eigen::Index>(idx))) / total;
    if (w > 0.0) picked = idx;  // fallback if rounding leaves u past the CDF
    acc += w;
    if (u < acc) {
      picked = idx;
      break;
    }
  }
  Assignment a;
  for (std::size_t p = 0; p < state.reg().size(); ++p)
    a[state.reg().node(p)] = state.reg().bit(picked, p);
  return a;
}

SatVerdict solve_sat(const BooleanNetwork& net, const EvolutionConfig& cfg,
                     const Assignment& input_overrides) {
  SatVerdict verdict;

  auto kets = consistent_kets(net, false);
  if (kets.empty()) {
    verdict.kind = SatVerdict::Kind::unsatisfiable;
    verdict.detail = "degenerate network: no consistent assignment even with pins ignored";
    return verdict;
  }

  // Preparation: free inputs (overridden or 0), then pins in register order,
  // each kept only while propagation stays conflict-free and some consistent
  // completion survives; finally the first consistent completion.
  Assignment base;
  for (const auto& n : net.free_inputs) base[n] = 0;
  for (const auto& [node, bit] : input_overrides) {
    if (std::find(net.free_inputs.begin(), net.free_inputs.end(), node) == net.free_inputs.end())
      throw Error("input override on '" + node + "', which is not a declared free input");
    if (bit != 0 && bit != 1) throw Error("input override must be 0 or 1");
    base[node] = bit;
  }

  auto extends = [&](const PartialAssignment& partial) -> std::optional<std::uint64_t> {
    for (auto ket : kets) {
      bool ok = true;
      for (std::size_t p = 0; p < partial.size() && ok; ++p)
        if (partial[p] >= 0 && net.reg.bit(ket, p) != partial[p]) ok = false;
      if (ok) return ket;
    }
    return std::nullopt;
  };

  auto partial = propagate_partial(net, partial_from(net, base));
  if (!partial)
    throw Error("propagation contradiction: the free-input assignment violates the network");
  if (!extends(*partial))
    throw Error("the free-input assignment admits no consistent completion");

  for (std::size_t p = 0; p < net.reg.size(); ++p) {
    const auto& node = net.reg.node(p);
    auto pin = net.pins.find(node);
    if (pin == net.pins.end() || (*partial)[p] >= 0) continue;
    PartialAssignment trial = *partial;
    trial[p] = static_cast<std::int8_t>(pin->second);
    auto propagated = propagate_partial(net, std::move(trial));
    if (propagated && extends(*propagated)) partial = std::move(propagated);
  }

  const std::uint64_t prepared_ket = *extends(*partial);
  const Assignment prepared = index_assignment(net, prepared_ket);

  // Pins the preparation already satisfies are held; mismatched ones are
  // driven from the prepared value to the pin by a half-turn.
  DriveSchedule schedule;
  for (std::size_t p = 0; p < net.reg.size(); ++p) {
    const auto& node = net.reg.node(p);
    auto pin = net.pins.find(node);
    if (pin == net.pins.end()) continue;
    if (prepared.at(node) == pin->second) {
      schedule.holds.push_back({node, pin->second});
    } else {
      DriveRotation rot;
      rot.node = node;
      rot.theta0 = prepared.at(node) == 0 ? 0.0 : std::numbers::pi / 2;
      rot.omega = 1.0;
      rot.duration = std::numbers::pi / 2;
      schedule.rotations.push_back(rot);
    }
  }

  verdict.trace = run_evolution(net, schedule, cfg, basis_ket(net.reg, prepared_ket));
  const EvolutionTrace& trace = verdict.trace;
  verdict.final_residual = trace.residual.empty() ? 0.0 : trace.residual.back();

  if (!trace.feasible) {
    verdict.kind = SatVerdict::Kind::unsatisfiable;
    verdict.halted_step = trace.halted_step;
    if (trace.halted_step) {
      verdict.halted_phi = trace.phi[*trace.halted_step];
      verdict.final_residual = trace.residual[*trace.halted_step];
    }
    std::ostringstream os;
    os << "drive became infeasible (residual " << verdict.final_residual << ")";
    if (cfg.permissive && trace.size() > 0) {
      verdict.trace.measurement = measure(trace.final_state(), cfg.seed);
      os << "; permissive run completed and measured a non-solution";
    }
    verdict.detail = os.str();
    return verdict;
  }

  Assignment witness = measure(trace.final_state(), cfg.seed);
  if (verify_solution(net, witness)) {
    verdict.kind = SatVerdict::Kind::satisfied;
    verdict.witness = witness;
    verdict.trace.measurement = std::move(witness);
  } else {
    verdict.kind = SatVerdict::Kind::unsatisfiable;
    verdict.detail = "measured assignment failed verification";
    verdict.trace.measurement = std::move(witness);
  }
  return verdict;
}

}  // namespace qreduct
