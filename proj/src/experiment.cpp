#include "qreduct/experiment.hpp"

#include "qreduct/fermion.hpp"
#include "qreduct/statistics.hpp"
#include "qreduct/transmission.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace qreduct {

namespace {

using nlohmann::json;

// --- serialization helpers --------------------------------------------------

// All floating-point output goes through here: 17 significant digits, enough
// to reproduce the double bit pattern on re-read.
std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string jstr(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string jcomplex(Complex z) { return "[" + fmt(z.real()) + ", " + fmt(z.imag()) + "]"; }

std::string jassignment(const Assignment& a) {
  std::string out = "{";
  bool first = true;
  for (const auto& [node, bit] : a) {
    if (!first) out += ", ";
    first = false;
    out += jstr(node) + ": " + std::to_string(bit);
  }
  return out + "}";
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void spit(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out.good()) throw Error("write failed for '" + path + "'");
}

json parse_json(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw Error(origin + ": " + e.what());
  }
}

void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                         const std::string& origin) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    if (!allowed.count(key)) {
      std::string known;
      for (const auto& k : allowed) known += (known.empty() ? "" : ", ") + k;
      throw Error(origin + ": unknown key '" + key + "' (known: " + known + ")");
    }
  }
}

// --- network schema -----------------------------------------------------------

Gate gate_from_json(const json& g) {
  if (!g.is_object()) throw Error("network: each gate must be an object");
  reject_unknown_keys(g, {"type", "nodes", "rows"}, "network gate");
  if (!g.contains("type") || !g.at("type").is_string())
    throw Error("network: gate requires a string 'type'");
  const std::string type = g.at("type").get<std::string>();
  if (type != "table" && g.contains("rows"))
    throw Error("network: 'rows' applies only to 'table' gates");
  if (!g.contains("nodes") || !g.at("nodes").is_array())
    throw Error("network: gate requires a 'nodes' array");
  std::vector<NodeLabel> nodes;
  for (const auto& n : g.at("nodes")) {
    if (!n.is_string()) throw Error("network: gate nodes must be strings");
    nodes.push_back(n.get<std::string>());
  }
  auto need_arity = [&](std::size_t k) {
    if (nodes.size() != k)
      throw Error("network: gate '" + type + "' takes exactly " + std::to_string(k) +
                  " nodes, got " + std::to_string(nodes.size()));
  };
  if (type == "cnot") {
    need_arity(4);
    return cnot_gate(nodes[0], nodes[1], nodes[2], nodes[3]);
  }
  if (type == "not") {
    need_arity(2);
    return not_gate(nodes[0], nodes[1]);
  }
  if (type == "toffoli") {
    need_arity(6);
    return toffoli_gate(nodes[0], nodes[1], nodes[2], nodes[3], nodes[4], nodes[5]);
  }
  if (type == "table") {
    if (g.contains("rows") && g.at("rows").is_array()) {
      std::vector<std::string> rows;
      for (const auto& r : g.at("rows")) {
        if (!r.is_string()) throw Error("network: table rows must be bitstrings");
        rows.push_back(r.get<std::string>());
      }
      return table_gate(nodes, rows);
    }
    throw Error("network: gate 'table' requires a 'rows' array");
  }
  throw Error("network: unknown gate type '" + type + "' (known: cnot, not, table, toffoli)");
}

BooleanNetwork network_from_json(const json& j, std::size_t cap, const std::string& origin) {
  if (!j.is_object()) throw Error(origin + ": network must be a JSON object");
  reject_unknown_keys(j, {"nodes", "gates", "wires", "pins", "free_inputs"}, origin);
  if (!j.contains("nodes") || !j.at("nodes").is_array())
    throw Error(origin + ": 'nodes' array is required");

  std::vector<NodeLabel> nodes;
  for (const auto& n : j.at("nodes")) {
    if (!n.is_string()) throw Error(origin + ": node labels must be strings");
    nodes.push_back(n.get<std::string>());
  }
  if (nodes.empty()) throw Error(origin + ": 'nodes' must not be empty");

  std::vector<Gate> gates;
  if (j.contains("gates")) {
    if (!j.at("gates").is_array()) throw Error(origin + ": 'gates' must be an array");
    for (const auto& g : j.at("gates")) gates.push_back(gate_from_json(g));
  }

  std::vector<std::pair<NodeLabel, NodeLabel>> wires;
  if (j.contains("wires")) {
    if (!j.at("wires").is_array()) throw Error(origin + ": 'wires' must be an array");
    for (const auto& w : j.at("wires")) {
      if (!w.is_array() || w.size() != 2 || !w.at(0).is_string() || !w.at(1).is_string())
        throw Error(origin + ": each wire must be a [from, to] pair of node labels");
      wires.emplace_back(w.at(0).get<std::string>(), w.at(1).get<std::string>());
    }
  }

  Assignment pins;
  if (j.contains("pins")) {
    if (!j.at("pins").is_object()) throw Error(origin + ": 'pins' must be an object");
    for (const auto& [node, bit] : j.at("pins").items()) {
      if (!bit.is_number_integer())
        throw Error(origin + ": pin '" + node + "' must be the integer 0 or 1");
      pins[node] = bit.get<int>();
    }
  }

  std::vector<NodeLabel> free_inputs;
  if (j.contains("free_inputs")) {
    if (!j.at("free_inputs").is_array()) throw Error(origin + ": 'free_inputs' must be an array");
    for (const auto& n : j.at("free_inputs")) {
      if (!n.is_string()) throw Error(origin + ": free inputs must be node labels");
      free_inputs.push_back(n.get<std::string>());
    }
  }

  return make_network(std::move(nodes), std::move(gates), std::move(wires), std::move(pins),
                      std::move(free_inputs), cap);
}

}  // namespace

BooleanNetwork parse_network_text(const std::string& text, std::size_t cap) {
  return network_from_json(parse_json(text, "network"), cap, "network");
}

BooleanNetwork parse_network(const std::string& path, std::size_t cap) {
  return network_from_json(parse_json(slurp(path), path), cap, path);
}

std::string emit_network(const BooleanNetwork& net) {
  std::ostringstream os;
  auto label_list = [&](const std::vector<NodeLabel>& labels) {
    std::string out = "[";
    for (std::size_t i = 0; i < labels.size(); ++i)
      out += (i ? ", " : "") + jstr(labels[i]);
    return out + "]";
  };
  os << "{\"nodes\": " << label_list(net.reg.nodes()) << ", \"gates\": [";
  for (std::size_t i = 0; i < net.gates.size(); ++i) {
    const Gate& g = net.gates[i];
    os << (i ? ", " : "") << "{\"type\": " << jstr(g.kind) << ", \"nodes\": "
       << label_list(g.nodes);
    if (g.kind == "table") {
      os << ", \"rows\": [";
      for (std::size_t r = 0; r < g.eigenstates.size(); ++r) {
        std::string row(g.arity(), '0');
        for (std::size_t p = 0; p < g.arity(); ++p)
          if ((g.eigenstates[r] >> (g.arity() - 1 - p)) & 1u) row[p] = '1';
        os << (r ? ", " : "") << jstr(row);
      }
      os << "]";
    }
    os << "}";
  }
  os << "], \"wires\": [";
  for (std::size_t i = 0; i < net.wires.size(); ++i)
    os << (i ? ", " : "") << "[" << jstr(net.wires[i].r) << ", " << jstr(net.wires[i].s) << "]";
  os << "], \"pins\": " << jassignment(net.pins);
  os << ", \"free_inputs\": " << label_list(net.free_inputs) << "}";
  return os.str();
}

// --- experiment specs ---------------------------------------------------------

const std::vector<std::string> kExperimentKinds = {
    "transmission-demo", "global-unitary-check", "sat-solve",         "oracle-compare",
    "fermion-embed",     "malfunction-scan",     "relaxation-scaling", "statistics-demo"};

ExperimentSpec parse_experiment(const std::string& path) {
  const json j = parse_json(slurp(path), path);
  if (!j.is_object()) throw Error(path + ": experiment spec must be a JSON object");
  reject_unknown_keys(
      j, {"kind", "network", "inputs", "seed", "steps", "out", "csv", "permissive", "cap", "params"},
      path);

  ExperimentSpec spec;
  if (!j.contains("kind") || !j.at("kind").is_string())
    throw Error(path + ": 'kind' is required and must be a string");
  spec.kind = j.at("kind").get<std::string>();
  if (std::find(kExperimentKinds.begin(), kExperimentKinds.end(), spec.kind) ==
      kExperimentKinds.end()) {
    std::string known;
    for (const auto& k : kExperimentKinds) known += (known.empty() ? "" : ", ") + k;
    throw Error(path + ": unknown kind '" + spec.kind + "' (known: " + known + ")");
  }

  const std::filesystem::path base = std::filesystem::path(path).parent_path();
  auto resolve = [&](const std::string& p) { return (base / p).lexically_normal().string(); };

  if (j.contains("network")) {
    if (!j.at("network").is_string()) throw Error(path + ": 'network' must be a path string");
    spec.network = resolve(j.at("network").get<std::string>());
  }
  if (j.contains("inputs")) {
    if (!j.at("inputs").is_object()) throw Error(path + ": 'inputs' must be an object");
    for (const auto& [node, bit] : j.at("inputs").items()) {
      if (!bit.is_number_integer())
        throw Error(path + ": input '" + node + "' must be the integer 0 or 1");
      spec.inputs[node] = bit.get<int>();
    }
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned())
      throw Error(path + ": 'seed' must be a nonnegative integer");
    spec.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("steps")) {
    if (!j.at("steps").is_number_integer() || j.at("steps").get<std::int64_t>() < 1)
      throw Error(path + ": 'steps' must be a positive integer");
    spec.steps = j.at("steps").get<int>();
  }
  if (j.contains("out")) {
    if (!j.at("out").is_string()) throw Error(path + ": 'out' must be a path string");
    spec.out = resolve(j.at("out").get<std::string>());
  }
  if (j.contains("csv")) {
    if (!j.at("csv").is_string()) throw Error(path + ": 'csv' must be a path string");
    spec.csv = resolve(j.at("csv").get<std::string>());
  }
  if (j.contains("permissive")) {
    if (!j.at("permissive").is_boolean()) throw Error(path + ": 'permissive' must be a boolean");
    spec.permissive = j.at("permissive").get<bool>();
  }
  if (j.contains("cap")) {
    if (!j.at("cap").is_number_unsigned())
      throw Error(path + ": 'cap' must be a nonnegative integer");
    spec.cap = j.at("cap").get<std::size_t>();
  }
  if (j.contains("params")) {
    if (!j.at("params").is_object()) throw Error(path + ": 'params' must be an object");
    for (const auto& [key, value] : j.at("params").items()) {
      if (!value.is_number()) throw Error(path + ": param '" + key + "' must be a number");
      spec.params[key] = value.get<double>();
    }
  }
  return spec;
}

// --- experiment runners ---------------------------------------------------------

namespace {

// Per-kind parameter schema: rejects unknown names up front.
class Params {
 public:
  Params(const ExperimentSpec& spec, std::initializer_list<const char*> allowed) : p_(spec.params) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, value] : p_) {
      (void)value;
      if (!ok.count(key)) {
        std::string known;
        for (const auto& k : ok) known += (known.empty() ? "" : ", ") + k;
        if (known.empty()) known = "none";
        throw Error("experiment '" + spec.kind + "': unknown param '" + key +
                    "' (accepted: " + known + ")");
      }
    }
  }

  double get(const std::string& key, double fallback) const {
    const auto it = p_.find(key);
    return it == p_.end() ? fallback : it->second;
  }

  std::int64_t get_int(const std::string& key, std::int64_t fallback) const {
    const auto it = p_.find(key);
    if (it == p_.end()) return fallback;
    if (it->second != std::floor(it->second) || std::abs(it->second) > 1e15)
      throw Error("param '" + key + "' must be an integer");
    return static_cast<std::int64_t>(it->second);
  }

 private:
  const std::map<std::string, double>& p_;
};

std::string envelope(const ExperimentSpec& spec) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"kind\": " << jstr(spec.kind) << ",\n";
  os << "  \"seed\": " << spec.seed << ",\n";
  os << "  \"steps\": " << spec.steps << ",\n";
  os << "  \"permissive\": " << (spec.permissive ? "true" : "false") << ",\n";
  os << "  \"params\": {";
  bool first = true;
  for (const auto& [key, value] : spec.params) {
    os << (first ? "" : ", ") << jstr(key) << ": " << fmt(value);
    first = false;
  }
  os << "},\n";
  return os.str();
}

std::string label_array(const std::vector<std::string>& labels) {
  std::string out = "[";
  for (std::size_t i = 0; i < labels.size(); ++i) out += (i ? ", " : "") + jstr(labels[i]);
  return out + "]";
}

// Shared per-step record emitter; `extra` appends additional fields per step.
void emit_records(std::ostringstream& os, const EvolutionTrace& trace,
                  const std::function<std::string(std::size_t)>& extra = {}) {
  os << "  \"records\": [";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << (i ? ",\n    " : "\n    ");
    os << "{\"phi\": " << fmt(trace.phi[i]) << ", \"residual\": " << fmt(trace.residual[i])
       << ", \"amplitudes\": {";
    for (std::size_t c = 0; c < trace.labels.size(); ++c)
      os << (c ? ", " : "") << jstr(trace.labels[c]) << ": "
         << jcomplex(trace.coeff[i](static_cast<Eigen::Index>(c)));
    os << "}";
    if (extra) os << extra(i);
    os << "}";
  }
  os << "\n  ]";
}

std::string trace_csv(const EvolutionTrace& trace, const std::string& prefix,
                      const std::function<std::string(std::size_t)>& extra_header_cols = {},
                      const std::function<std::string(std::size_t)>& extra = {}) {
  std::ostringstream os;
  os << "phi";
  for (const auto& label : trace.labels) os << "," << prefix << label;
  if (extra_header_cols) os << extra_header_cols(0);
  os << ",residual\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    os << fmt(trace.phi[i]);
    for (std::size_t c = 0; c < trace.labels.size(); ++c)
      os << "," << fmt(std::norm(trace.coeff[i](static_cast<Eigen::Index>(c))));
    if (extra) os << extra(i);
    os << "," << fmt(trace.residual[i]) << "\n";
  }
  return os.str();
}

ExperimentResult finish(const ExperimentSpec& spec, ExperimentResult r) {
  if (!spec.out.empty()) spit(spec.out, r.json);
  if (!spec.csv.empty()) {
    if (r.csv.empty())
      throw Error("experiment '" + spec.kind + "' produces no CSV artifact");
    spit(spec.csv, r.csv);
  }
  return r;
}

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

ExperimentResult run_transmission_demo(const ExperimentSpec& spec) {
  const Params p(spec, {"theta0", "phi"});
  const double theta0 = p.get("theta0", 0.3);
  const double phi = p.get("phi", 0.2);
  const EvolutionTrace trace = evolve_transmission(theta0, phi, spec.steps);

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"theta0\": " << fmt(theta0) << ",\n";
  os << "  \"phi_total\": " << fmt(phi) << ",\n";
  os << "  \"register\": " << label_array({trace.reg.node(0), trace.reg.node(1)}) << ",\n";
  emit_records(os, trace);
  os << "\n}\n";

  ExperimentResult r;
  r.json = os.str();
  r.csv = trace_csv(trace, "p");
  return finish(spec, r);
}

ExperimentResult run_global_unitary_check(const ExperimentSpec& spec) {
  const Params p(spec, {"phi", "samples"});
  const double phi = p.get("phi", std::numbers::pi / 4);
  const std::int64_t samples = p.get_int("samples", 100);
  if (samples < 1) throw Error("global-unitary-check: samples must be >= 1");

  const Transmission t("r", "s");
  const Matrix proj = wire_projector(t).mat();
  std::mt19937_64 rng(spec.seed);
  double max_map = 0.0, max_comm = 0.0;
  for (std::int64_t i = 0; i < samples; ++i) {
    const double theta = 2.0 * std::numbers::pi * uniform(rng);
    const double dphi = 2.0 * std::numbers::pi * uniform(rng);
    Vector in = Vector::Zero(4), want = Vector::Zero(4);
    in(1) = std::cos(theta);
    in(2) = std::sin(theta);
    want(1) = std::cos(theta + dphi);
    want(2) = std::sin(theta + dphi);
    const Matrix q = global_unitary(t, dphi).mat();
    max_map = std::max(max_map, (q * in - want).norm());
    max_comm = std::max(max_comm, (q * proj - proj * q).norm());
  }
  const LinearOperator q_at_phi = global_unitary(t, phi);
  const int rank = operator_schmidt_rank(q_at_phi, {"r"});
  const auto coeffs = operator_schmidt_coefficients(q_at_phi, {"r"});
  const bool pass = max_map <= 1e-12 && max_comm <= 1e-12 && rank >= 2;

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"phi\": " << fmt(phi) << ",\n";
  os << "  \"samples\": " << samples << ",\n";
  os << "  \"max_map_error\": " << fmt(max_map) << ",\n";
  os << "  \"max_commutator_error\": " << fmt(max_comm) << ",\n";
  os << "  \"schmidt_rank\": " << rank << ",\n";
  os << "  \"schmidt_coefficients\": [";
  for (std::size_t i = 0; i < coeffs.size(); ++i) os << (i ? ", " : "") << fmt(coeffs[i]);
  os << "],\n";
  os << "  \"pass\": " << (pass ? "true" : "false") << "\n}\n";

  ExperimentResult r;
  r.exit_code = pass ? 0 : 1;
  r.json = os.str();
  return finish(spec, r);
}

ExperimentResult run_sat_solve(const ExperimentSpec& spec) {
  const Params p(spec, {});
  if (spec.network.empty()) throw Error("sat-solve requires a 'network' file");
  const BooleanNetwork net = parse_network(spec.network, spec.cap);

  EvolutionConfig cfg;
  cfg.steps = spec.steps;
  cfg.seed = spec.seed;
  cfg.permissive = spec.permissive;
  const SatVerdict verdict = solve_sat(net, cfg, spec.inputs);
  const EvolutionTrace& trace = verdict.trace;

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"network\": " << emit_network(net) << ",\n";
  os << "  \"register\": " << label_array(net.reg.nodes()) << ",\n";
  os << "  \"verdict\": "
     << jstr(verdict.kind == SatVerdict::Kind::satisfied ? "satisfied" : "unsatisfiable") << ",\n";
  os << "  \"witness\": " << (verdict.witness ? jassignment(*verdict.witness) : "null") << ",\n";
  os << "  \"measurement\": "
     << (trace.measurement ? jassignment(*trace.measurement) : "null") << ",\n";
  os << "  \"final_residual\": " << fmt(verdict.final_residual) << ",\n";
  os << "  \"halted_step\": "
     << (verdict.halted_step ? std::to_string(*verdict.halted_step) : "null") << ",\n";
  os << "  \"halted_phi\": " << (verdict.halted_phi ? fmt(*verdict.halted_phi) : "null") << ",\n";
  os << "  \"detail\": " << jstr(verdict.detail) << ",\n";
  emit_records(os, trace);
  os << "\n}\n";

  ExperimentResult r;
  r.exit_code = verdict.kind == SatVerdict::Kind::satisfied ? 0 : 2;
  r.json = os.str();
  r.csv = trace_csv(trace, "p_");
  return finish(spec, r);
}

ExperimentResult run_oracle_compare(const ExperimentSpec& spec) {
  const Params p(spec, {"max_nodes", "sweep_steps"});
  const std::int64_t max_nodes = p.get_int("max_nodes", 5);
  EvolutionConfig cfg;
  cfg.steps = static_cast<int>(p.get_int("sweep_steps", 24));
  cfg.seed = spec.seed;
  const SweepReport rep = oracle_equivalence_sweep(static_cast<std::size_t>(max_nodes), cfg);

  const bool accounted = rep.unsat_halted + rep.unsat_degenerate == rep.unsat_runs &&
                         (rep.unsat_halted == 0 || rep.min_halt_residual > tol::residual);
  const bool pass = rep.mismatches.empty() && accounted;

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"max_nodes\": " << max_nodes << ",\n";
  os << "  \"networks\": " << rep.networks << ",\n";
  os << "  \"runs\": " << rep.runs << ",\n";
  os << "  \"agreements\": " << rep.agreements << ",\n";
  os << "  \"disagreements\": " << rep.mismatches.size() << ",\n";
  os << "  \"sat_runs\": " << rep.sat_runs << ",\n";
  os << "  \"unsat_runs\": " << rep.unsat_runs << ",\n";
  os << "  \"unsat_halted\": " << rep.unsat_halted << ",\n";
  os << "  \"unsat_degenerate\": " << rep.unsat_degenerate << ",\n";
  os << "  \"min_halt_residual\": "
     << (std::isfinite(rep.min_halt_residual) ? fmt(rep.min_halt_residual) : "null") << ",\n";
  os << "  \"mismatches\": [";
  for (std::size_t i = 0; i < rep.mismatches.size(); ++i)
    os << (i ? ",\n    " : "\n    ") << jstr(rep.mismatches[i]);
  os << (rep.mismatches.empty() ? "]" : "\n  ]") << ",\n";
  os << "  \"pass\": " << (pass ? "true" : "false") << "\n}\n";

  ExperimentResult r;
  r.exit_code = pass ? 0 : 1;
  r.json = os.str();
  return finish(spec, r);
}

ExperimentResult run_fermion_embed(const ExperimentSpec& spec) {
  const Params p(spec, {"theta0", "phi", "ea", "eb", "ec", "ed"});
  const double theta0 = p.get("theta0", 0.0);
  const double phi = p.get("phi", std::numbers::pi / 2);
  TransmissionEnergies e;
  e.ea = p.get("ea", e.ea);
  e.eb = p.get("eb", e.eb);
  e.ec = p.get("ec", e.ec);
  e.ed = p.get("ed", e.ed);

  const EvolutionTrace trace = embedded_evolution(theta0, phi, spec.steps, e);
  const Register wire_reg({"r", "s"});
  auto wire_state = [&](std::size_t i) {
    const Vector& c = trace.coeff[i];
    return StateVector(wire_reg, (Vector(4) << c(2), c(0), c(1), c(3)).finished());
  };
  auto extra = [&](std::size_t i) {
    const StateVector w = wire_state(i);
    return ", \"malfunction\": " + fmt(malfunction_probability(w)) +
           ", \"energy\": " + fmt(expected_energy(w, e));
  };

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"theta0\": " << fmt(theta0) << ",\n";
  os << "  \"phi_total\": " << fmt(phi) << ",\n";
  os << "  \"energies\": {\"ea\": " << fmt(e.ea) << ", \"eb\": " << fmt(e.eb)
     << ", \"ec\": " << fmt(e.ec) << ", \"ed\": " << fmt(e.ed) << "},\n";
  os << "  \"register\": " << label_array(trace.reg.nodes()) << ",\n";
  os << "  \"alias_labels\": " << label_array(trace.labels) << ",\n";
  emit_records(os, trace, extra);
  os << "\n}\n";

  std::ostringstream csv;
  csv << "phi,p01,p10,malfunction,energy,residual\n";
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const StateVector w = wire_state(i);
    csv << fmt(trace.phi[i]) << "," << fmt(std::norm(trace.coeff[i](0))) << ","
        << fmt(std::norm(trace.coeff[i](1))) << "," << fmt(malfunction_probability(w)) << ","
        << fmt(expected_energy(w, e)) << "," << fmt(trace.residual[i]) << "\n";
  }

  ExperimentResult r;
  r.json = os.str();
  r.csv = csv.str();
  return finish(spec, r);
}

ExperimentResult run_malfunction_scan(const ExperimentSpec& spec) {
  const Params p(spec, {"points", "theta", "split", "ea", "eb", "ec", "ed"});
  const std::int64_t points = p.get_int("points", 101);
  if (points < 2) throw Error("malfunction-scan: points must be >= 2");
  const double theta = p.get("theta", std::numbers::pi / 4);
  const double split = p.get("split", 0.5);
  if (split < 0.0 || split > 1.0) throw Error("malfunction-scan: split must lie in [0, 1]");
  TransmissionEnergies e;
  e.ea = p.get("ea", e.ea);
  e.eb = p.get("eb", e.eb);
  e.ec = p.get("ec", e.ec);
  e.ed = p.get("ed", e.ed);
  validate(e);

  const Register wire_reg({"r", "s"});
  double max_q_err = 0.0, max_xi_err = 0.0;
  std::ostringstream csv;
  csv << "leak,malfunction,energy\n";
  for (std::int64_t i = 0; i < points; ++i) {
    const double leak = static_cast<double>(i) / static_cast<double>(points - 1);
    const double gamma = std::sqrt(leak * split), delta = std::sqrt(leak * (1.0 - split));
    Vector amp(4);
    amp << gamma, std::sqrt(1.0 - leak) * std::cos(theta),
        std::sqrt(1.0 - leak) * std::sin(theta), delta;
    const StateVector w(wire_reg, amp);
    const double q = malfunction_probability(w);
    const double xi = expected_energy(w, e);
    max_q_err = std::max(max_q_err, std::abs(q - leak));
    max_xi_err = std::max(max_xi_err, std::abs(xi - (gamma * gamma * e.ec + delta * delta * e.ed)));
    csv << fmt(leak) << "," << fmt(q) << "," << fmt(xi) << "\n";
  }

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"points\": " << points << ",\n";
  os << "  \"theta\": " << fmt(theta) << ",\n";
  os << "  \"split\": " << fmt(split) << ",\n";
  os << "  \"energies\": {\"ea\": " << fmt(e.ea) << ", \"eb\": " << fmt(e.eb)
     << ", \"ec\": " << fmt(e.ec) << ", \"ed\": " << fmt(e.ed) << "},\n";
  os << "  \"max_probability_error\": " << fmt(max_q_err) << ",\n";
  os << "  \"max_energy_error\": " << fmt(max_xi_err) << "\n}\n";

  ExperimentResult r;
  r.json = os.str();
  r.csv = csv.str();
  return finish(spec, r);
}

ExperimentResult run_relaxation_scaling(const ExperimentSpec& spec) {
  const Params p(spec, {"sigma", "p_target", "n_min", "n_max", "points", "samples"});
  const double sigma = p.get("sigma", 1.0);
  const double p_target = p.get("p_target", 0.9);
  const std::int64_t n_min = p.get_int("n_min", 1);
  const std::int64_t n_max = p.get_int("n_max", 10000);
  const std::int64_t points = p.get_int("points", 25);
  const std::int64_t samples = p.get_int("samples", 2000);
  if (n_min < 1 || n_max < n_min) throw Error("relaxation-scaling: need 1 <= n_min <= n_max");
  if (points < 1) throw Error("relaxation-scaling: points must be >= 1");
  if (samples < 0) throw Error("relaxation-scaling: samples must be >= 0");

  // Log-spaced transmission counts, deduplicated after rounding.
  std::vector<std::int64_t> ns;
  for (std::int64_t i = 0; i < points; ++i) {
    const double f = points == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(points - 1);
    const double v = std::exp(std::log(static_cast<double>(n_min)) +
                              f * (std::log(static_cast<double>(n_max)) -
                                   std::log(static_cast<double>(n_min))));
    const auto n = static_cast<std::int64_t>(std::llround(v));
    if (ns.empty() || n > ns.back()) ns.push_back(n);
  }

  std::ostringstream csv, rows;
  csv << (samples > 0 ? "n,t,mc\n" : "n,t\n");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double t = relaxation_time(sigma, p_target, ns[i]);
    csv << ns[i] << "," << fmt(t);
    rows << (i ? ",\n    " : "\n    ") << "{\"n\": " << ns[i] << ", \"t\": " << fmt(t);
    if (samples > 0) {
      const double mc = relaxation_mc_estimate(sigma, t, ns[i], samples, spec.seed + i);
      csv << "," << fmt(mc);
      rows << ", \"mc\": " << fmt(mc);
    }
    csv << "\n";
    rows << "}";
  }

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"sigma\": " << fmt(sigma) << ",\n";
  os << "  \"p_target\": " << fmt(p_target) << ",\n";
  os << "  \"samples\": " << samples << ",\n";
  os << "  \"rows\": [" << rows.str() << "\n  ]\n}\n";

  ExperimentResult r;
  r.json = os.str();
  r.csv = csv.str();
  return finish(spec, r);
}

ExperimentResult run_statistics_demo(const ExperimentSpec& spec) {
  const Params p(spec, {"k", "x_max", "points", "trials"});
  const double k = p.get("k", 1.0);
  const double x_max = p.get("x_max", std::numbers::pi);
  const std::int64_t points = p.get_int("points", 100);
  const std::int64_t trials = p.get_int("trials", 200);
  if (points < 2) throw Error("statistics-demo: points must be >= 2");
  if (trials < 1) throw Error("statistics-demo: trials must be >= 1");

  double max_sum_err = 0.0;
  std::ostringstream csv;
  csv << "x,singlet,triplet\n";
  for (std::int64_t i = 0; i < points; ++i) {
    const double x = x_max * static_cast<double>(i) / static_cast<double>(points - 1);
    const double sing = spatial_density(k, x, SpinSector::singlet);
    const double trip = spatial_density(k, x, SpinSector::triplet);
    max_sum_err = std::max(max_sum_err, std::abs(sing + trip - 1.0));
    csv << fmt(x) << "," << fmt(sing) << "," << fmt(trip) << "\n";
  }

  // Exchange-projector properties on random two-particle states.
  const Register reg({"x1", "y1", "x2", "y2"});
  const Matrix sym = symmetric_projector(reg).mat();
  const Matrix anti = antisymmetric_projector(reg).mat();
  std::mt19937_64 rng(spec.seed);
  double max_idem = 0.0, max_cross = 0.0;
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    Vector amp(16);
    for (Eigen::Index i = 0; i < 16; ++i)
      amp(i) = Complex(2.0 * uniform(rng) - 1.0, 2.0 * uniform(rng) - 1.0);
    const StateVector v = normalize(StateVector(reg, amp));
    const StateVector s = symmetrize(v);
    const StateVector a = antisymmetrize(v);
    max_idem = std::max(max_idem, distance(symmetrize(s), s));
    max_idem = std::max(max_idem, distance(antisymmetrize(a), a));
    max_cross = std::max(max_cross, (anti * s.amp()).norm());
    max_cross = std::max(max_cross, (sym * a.amp()).norm());
  }

  std::ostringstream os;
  os << envelope(spec);
  os << "  \"k\": " << fmt(k) << ",\n";
  os << "  \"x_max\": " << fmt(x_max) << ",\n";
  os << "  \"points\": " << points << ",\n";
  os << "  \"trials\": " << trials << ",\n";
  os << "  \"max_sector_sum_error\": " << fmt(max_sum_err) << ",\n";
  os << "  \"max_idempotence_error\": " << fmt(max_idem) << ",\n";
  os << "  \"max_cross_annihilation\": " << fmt(max_cross) << "\n}\n";

  ExperimentResult r;
  r.json = os.str();
  r.csv = csv.str();
  return finish(spec, r);
}

}  // namespace

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  if (spec.kind == "transmission-demo") return run_transmission_demo(spec);
  if (spec.kind == "global-unitary-check") return run_global_unitary_check(spec);
  if (spec.kind == "sat-solve") return run_sat_solve(spec);
  if (spec.kind == "oracle-compare") return run_oracle_compare(spec);
  if (spec.kind == "fermion-embed") return run_fermion_embed(spec);
  if (spec.kind == "malfunction-scan") return run_malfunction_scan(spec);
  if (spec.kind == "relaxation-scaling") return run_relaxation_scaling(spec);
  if (spec.kind == "statistics-demo") return run_statistics_demo(spec);
  throw Error("unknown experiment kind '" + spec.kind + "'");
}

// --- oracle-equivalence sweep -----------------------------------------------------

namespace {

struct SweepStructure {
  std::vector<NodeLabel> nodes;  // covered nodes in master order
  std::vector<Gate> gates;
  std::vector<std::pair<NodeLabel, NodeLabel>> wires;
};

std::vector<SweepStructure> sweep_structures(std::size_t max_nodes) {
  const std::vector<NodeLabel> master = {"n1", "n2", "n3", "n4", "n5"};
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < max_nodes; ++i)
    for (std::size_t j = i + 1; j < max_nodes; ++j) pairs.emplace_back(i, j);

  auto covered = [&](const SweepStructure& s) {
    std::array<bool, 5> used{};
    for (const Gate& g : s.gates)
      for (const auto& n : g.nodes)
        for (std::size_t i = 0; i < max_nodes; ++i)
          if (master[i] == n) used[i] = true;
    for (const auto& [a, b] : s.wires)
      for (std::size_t i = 0; i < max_nodes; ++i)
        if (master[i] == a || master[i] == b) used[i] = true;
    std::vector<NodeLabel> nodes;
    for (std::size_t i = 0; i < max_nodes; ++i)
      if (used[i]) nodes.push_back(master[i]);
    return nodes;
  };

  std::vector<SweepStructure> out;
  // (a) every nonempty wire set.
  for (std::uint32_t mask = 1; mask < (1u << pairs.size()); ++mask) {
    SweepStructure s;
    for (std::size_t i = 0; i < pairs.size(); ++i)
      if ((mask >> i) & 1u)
        s.wires.emplace_back(master[pairs[i].first], master[pairs[i].second]);
    s.nodes = covered(s);
    out.push_back(std::move(s));
  }
  // (b) one controlled-NOT in each role ordering over the first four nodes,
  // with zero, one, or two extra wires anywhere.
  if (max_nodes >= 4) {
    std::array<std::size_t, 4> perm = {0, 1, 2, 3};
    do {
      const Gate gate =
          cnot_gate(master[perm[0]], master[perm[1]], master[perm[2]], master[perm[3]]);
      auto push = [&](std::vector<std::pair<NodeLabel, NodeLabel>> wires) {
        SweepStructure s;
        s.gates = {gate};
        s.wires = std::move(wires);
        s.nodes = covered(s);
        out.push_back(std::move(s));
      };
      push({});
      for (std::size_t a = 0; a < pairs.size(); ++a) {
        push({{master[pairs[a].first], master[pairs[a].second]}});
        for (std::size_t b = a + 1; b < pairs.size(); ++b)
          push({{master[pairs[a].first], master[pairs[a].second]},
                {master[pairs[b].first], master[pairs[b].second]}});
      }
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return out;
}

std::string describe_pins(const Assignment& pins) {
  if (pins.empty()) return "(none)";
  std::string out;
  for (const auto& [node, bit] : pins)
    out += (out.empty() ? "" : ",") + node + "=" + std::to_string(bit);
  return out;
}

}  // namespace

SweepReport oracle_equivalence_sweep(std::size_t max_nodes, const EvolutionConfig& cfg) {
  if (max_nodes < 2 || max_nodes > 5)
    throw Error("oracle sweep: the family is defined for 2..5 nodes");
  const auto start = std::chrono::steady_clock::now();

  SweepReport rep;
  const auto structures = sweep_structures(max_nodes);
  rep.networks = structures.size();
  constexpr std::size_t kMismatchCap = 25;

  for (const SweepStructure& s : structures) {
    BooleanNetwork net = make_network(s.nodes, s.gates, s.wires, {}, {});
    const auto kets_all = consistent_kets(net, false);  // pin-independent
    const std::size_t n = s.nodes.size();

    std::size_t patterns = 1;
    for (std::size_t i = 0; i < n; ++i) patterns *= 3;
    for (std::size_t code = 0; code < patterns; ++code) {
      Assignment pins;
      std::uint64_t mask = 0, want = 0;
      std::size_t rest = code;
      for (std::size_t pos = 0; pos < n; ++pos) {
        const std::size_t digit = rest % 3;
        rest /= 3;
        if (digit == 0) continue;
        const int bit = digit == 2 ? 1 : 0;
        pins[s.nodes[pos]] = bit;
        mask |= std::uint64_t{1} << (n - 1 - pos);
        if (bit) want |= std::uint64_t{1} << (n - 1 - pos);
      }
      net.pins = pins;

      bool oracle_sat = false;
      for (const auto ket : kets_all)
        if ((ket & mask) == want) {
          oracle_sat = true;
          break;
        }

      const SatVerdict verdict = solve_sat(net, cfg);
      const bool evolved_sat = verdict.kind == SatVerdict::Kind::satisfied;
      ++rep.runs;

      bool agree = evolved_sat == oracle_sat;
      if (evolved_sat && !verify_solution(net, *verdict.witness)) agree = false;
      if (agree) {
        ++rep.agreements;
      } else if (rep.mismatches.size() < kMismatchCap) {
        rep.mismatches.push_back("net=" + emit_network(net) + " pins=" + describe_pins(pins) +
                                 " oracle=" + (oracle_sat ? "sat" : "unsat") +
                                 " evolved=" + (evolved_sat ? "sat" : "unsat"));
      }

      if (evolved_sat) {
        ++rep.sat_runs;
      } else {
        ++rep.unsat_runs;
        if (verdict.halted_step) {
          ++rep.unsat_halted;
          rep.min_halt_residual = std::min(rep.min_halt_residual, verdict.final_residual);
        } else if (verdict.trace.size() == 0) {
          ++rep.unsat_degenerate;
        }
      }
    }
  }

  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return rep;
}

}  // namespace qreduct
