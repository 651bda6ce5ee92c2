#include "qreduct/network.hpp"

#include <algorithm>
#include <cstdlib>
#include <set>
#include <sstream>

namespace qreduct {

namespace {

Gate make_gate(std::string kind, std::vector<NodeLabel> nodes,
               std::vector<std::uint32_t> eigenstates) {
  Gate g;
  g.kind = std::move(kind);
  g.nodes = std::move(nodes);
  g.eigenstates = std::move(eigenstates);
  std::set<NodeLabel> seen(g.nodes.begin(), g.nodes.end());
  if (seen.size() != g.nodes.size()) throw Error("gate: duplicate node");
  if (g.nodes.empty() || g.nodes.size() > 16) throw Error("gate: bad arity");
  std::set<std::uint32_t> rows(g.eigenstates.begin(), g.eigenstates.end());
  if (rows.size() != g.eigenstates.size()) throw Error("gate: duplicate eigenstate");
  if (g.eigenstates.empty()) throw Error("gate: empty eigenstate table");
  for (auto e : g.eigenstates)
    if (e >= (1u << g.nodes.size())) throw Error("gate: eigenstate out of range");
  return g;
}

int gate_bit(std::uint32_t pattern, std::size_t arity, std::size_t pos) {
  return static_cast<int>((pattern >> (arity - 1 - pos)) & 1u);
}

// Fast per-ket evaluation context.
struct NetworkScan {
  struct GateScan {
    std::vector<std::size_t> shifts;        // register bit shifts per gate node
    std::vector<char> admitted;             // lookup over 2^arity patterns
  };
  std::vector<GateScan> gates;
  std::vector<std::pair<std::size_t, std::size_t>> wires;  // bit shifts of (r, s)
  std::uint64_t pin_mask = 0, pin_want = 0;

  explicit NetworkScan(const BooleanNetwork& net, bool respect_pins) {
    const std::size_t n = net.reg.size();
    for (const auto& g : net.gates) {
      GateScan gs;
      for (const auto& node : g.nodes)
        gs.shifts.push_back(n - 1 - net.reg.position_of(node));
      gs.admitted.assign(std::size_t{1} << g.arity(), 0);
      for (auto e : g.eigenstates) gs.admitted[e] = 1;
      gates.push_back(std::move(gs));
    }
    for (const auto& w : net.wires)
      wires.emplace_back(n - 1 - net.reg.position_of(w.r), n - 1 - net.reg.position_of(w.s));
    if (respect_pins)
      for (const auto& [node, bit] : net.pins) {
        pin_mask |= std::uint64_t{1} << (n - 1 - net.reg.position_of(node));
        if (bit) pin_want |= std::uint64_t{1} << (n - 1 - net.reg.position_of(node));
      }
  }

  bool admits(std::uint64_t ket) const {
    if ((ket & pin_mask) != pin_want) return false;
    for (const auto& [a, b] : wires)
      if (((ket >> a) & 1u) == ((ket >> b) & 1u)) return false;
    for (const auto& g : gates) {
      std::uint32_t pattern = 0;
      for (std::size_t s : g.shifts) pattern = (pattern << 1) | ((ket >> s) & 1u);
      if (!g.admitted[pattern]) return false;
    }
    return true;
  }
};

}  // namespace

Gate cnot_gate(const NodeLabel& t, const NodeLabel& u, const NodeLabel& v, const NodeLabel& r) {
  std::vector<std::uint32_t> rows;
  for (std::uint32_t tb = 0; tb < 2; ++tb)
    for (std::uint32_t ub = 0; ub < 2; ++ub)
      rows.push_back((tb << 3) | (ub << 2) | (tb << 1) | (tb ^ ub));
  return make_gate("cnot", {t, u, v, r}, std::move(rows));
}

Gate not_gate(const NodeLabel& a, const NodeLabel& b) {
  return make_gate("not", {a, b}, {0b01, 0b10});
}

Gate toffoli_gate(const NodeLabel& a, const NodeLabel& b, const NodeLabel& c,
                  const NodeLabel& ao, const NodeLabel& bo, const NodeLabel& co) {
  std::vector<std::uint32_t> rows;
  for (std::uint32_t ab = 0; ab < 2; ++ab)
    for (std::uint32_t bb = 0; bb < 2; ++bb)
      for (std::uint32_t cb = 0; cb < 2; ++cb)
        rows.push_back((ab << 5) | (bb << 4) | (cb << 3) | (ab << 2) | (bb << 1) |
                       (cb ^ (ab & bb)));
  return make_gate("toffoli", {a, b, c, ao, bo, co}, std::move(rows));
}

Gate table_gate(std::vector<NodeLabel> nodes, const std::vector<std::string>& rows) {
  std::vector<std::uint32_t> eigenstates;
  for (const auto& row : rows) {
    if (row.size() != nodes.size()) throw Error("gate table: row '" + row + "' has wrong width");
    std::uint32_t e = 0;
    for (char ch : row) {
      if (ch != '0' && ch != '1') throw Error("gate table: row '" + row + "' is not binary");
      e = (e << 1) | static_cast<std::uint32_t>(ch == '1');
    }
    eigenstates.push_back(e);
  }
  return make_gate("table", std::move(nodes), std::move(eigenstates));
}

std::size_t register_cap_from_env() {
  if (const char* env = std::getenv("QREDUCT_CAP")) {
    char* end = nullptr;
    long v = std::strtol(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 24) return static_cast<std::size_t>(v);
    throw Error("QREDUCT_CAP must be an integer between 1 and 24");
  }
  return 14;
}

BooleanNetwork make_network(std::vector<NodeLabel> nodes, std::vector<Gate> gates,
                            std::vector<std::pair<NodeLabel, NodeLabel>> wires,
                            Assignment pins, std::vector<NodeLabel> free_inputs,
                            std::size_t cap) {
  if (cap == 0) cap = register_cap_from_env();
  BooleanNetwork net;
  net.reg = Register(std::move(nodes));
  if (net.reg.size() > cap) {
    std::ostringstream os;
    os << "network has " << net.reg.size() << " nodes; the dense simulator is capped at " << cap
       << " (raise with --cap or QREDUCT_CAP at your own risk)";
    throw Error(os.str());
  }
  for (const auto& g : gates)
    for (const auto& n : g.nodes)
      if (!net.reg.contains(n)) throw Error("gate references unknown node '" + n + "'");
  net.gates = std::move(gates);
  for (const auto& [a, b] : wires) {
    if (!net.reg.contains(a) || !net.reg.contains(b))
      throw Error("wire references unknown node '" + a + "'/'" + b + "'");
    net.wires.emplace_back(a, b);
  }
  for (const auto& [node, bit] : pins) {
    if (!net.reg.contains(node)) throw Error("pin references unknown node '" + node + "'");
    if (bit != 0 && bit != 1) throw Error("pin on '" + node + "' must be 0 or 1");
  }
  net.pins = std::move(pins);
  std::set<NodeLabel> fi;
  for (const auto& n : free_inputs) {
    if (!net.reg.contains(n)) throw Error("free input references unknown node '" + n + "'");
    if (!fi.insert(n).second) throw Error("duplicate free input '" + n + "'");
    if (net.pins.count(n)) throw Error("free input '" + n + "' is pinned");
  }
  net.free_inputs = std::move(free_inputs);
  return net;
}

std::uint64_t assignment_index(const BooleanNetwork& net, const Assignment& a) {
  std::uint64_t idx = 0;
  for (std::size_t p = 0; p < net.reg.size(); ++p) {
    auto it = a.find(net.reg.node(p));
    if (it == a.end()) throw Error("assignment is incomplete at '" + net.reg.node(p) + "'");
    if (it->second != 0 && it->second != 1) throw Error("assignment bit must be 0 or 1");
    idx = (idx << 1) | static_cast<std::uint64_t>(it->second);
  }
  return idx;
}

Assignment index_assignment(const BooleanNetwork& net, std::uint64_t idx) {
  Assignment a;
  for (std::size_t p = 0; p < net.reg.size(); ++p) a[net.reg.node(p)] = net.reg.bit(idx, p);
  return a;
}

std::vector<std::uint64_t> consistent_kets(const BooleanNetwork& net, bool respect_pins) {
  NetworkScan scan(net, respect_pins);
  std::vector<std::uint64_t> out;
  for (std::uint64_t ket = 0; ket < net.reg.dim(); ++ket)
    if (scan.admits(ket)) out.push_back(ket);
  return out;
}

std::vector<Assignment> consistent_assignments(const BooleanNetwork& net, bool respect_pins) {
  std::vector<Assignment> out;
  for (auto ket : consistent_kets(net, respect_pins)) out.push_back(index_assignment(net, ket));
  return out;
}

bool verify_solution(const BooleanNetwork& net, const Assignment& a) {
  if (a.size() != net.reg.size()) return false;
  std::uint64_t idx;
  try {
    idx = assignment_index(net, a);
  } catch (const Error&) {
    return false;
  }
  return NetworkScan(net, true).admits(idx);
}

PartialAssignment partial_from(const BooleanNetwork& net, const Assignment& a) {
  PartialAssignment partial(net.reg.size(), -1);
  for (const auto& [node, bit] : a) {
    if (bit != 0 && bit != 1) throw Error("assignment bit must be 0 or 1");
    partial[net.reg.position_of(node)] = static_cast<std::int8_t>(bit);
  }
  return partial;
}

std::optional<PartialAssignment> propagate_partial(const BooleanNetwork& net,
                                                   PartialAssignment partial) {
  if (partial.size() != net.reg.size()) throw Error("partial assignment has wrong width");
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& w : net.wires) {
      std::int8_t& a = partial[net.reg.position_of(w.r)];
      std::int8_t& b = partial[net.reg.position_of(w.s)];
      if (a >= 0 && b >= 0) {
        if (a == b) return std::nullopt;  // wire demands disagreement
      } else if (a >= 0) {
        b = static_cast<std::int8_t>(1 - a);
        changed = true;
      } else if (b >= 0) {
        a = static_cast<std::int8_t>(1 - b);
        changed = true;
      }
    }
    for (const auto& g : net.gates) {
      std::vector<std::size_t> pos;
      pos.reserve(g.arity());
      for (const auto& n : g.nodes) pos.push_back(net.reg.position_of(n));
      std::vector<std::uint32_t> live;
      for (auto e : g.eigenstates) {
        bool ok = true;
        for (std::size_t k = 0; k < g.arity() && ok; ++k)
          if (partial[pos[k]] >= 0 && gate_bit(e, g.arity(), k) != partial[pos[k]]) ok = false;
        if (ok) live.push_back(e);
      }
      if (live.empty()) return std::nullopt;
      for (std::size_t k = 0; k < g.arity(); ++k) {
        if (partial[pos[k]] >= 0) continue;
        const int want = gate_bit(live.front(), g.arity(), k);
        bool forced = true;
        for (auto e : live)
          if (gate_bit(e, g.arity(), k) != want) {
            forced = false;
            break;
          }
        if (forced) {
          partial[pos[k]] = static_cast<std::int8_t>(want);
          changed = true;
        }
      }
    }
  }
  return partial;
}

Assignment classical_propagate(const BooleanNetwork& net, const Assignment& input) {
  for (const auto& [node, bit] : input) {
    (void)bit;
    if (!net.reg.contains(node)) throw Error("input references unknown node '" + node + "'");
  }
  auto result = propagate_partial(net, partial_from(net, input));
  if (!result)
    throw Error("propagation contradiction: the input violates the network's constraints");
  std::vector<NodeLabel> missing;
  for (std::size_t p = 0; p < result->size(); ++p)
    if ((*result)[p] < 0) missing.push_back(net.reg.node(p));
  if (!missing.empty()) {
    std::ostringstream os;
    os << "propagation does not determine";
    for (const auto& n : missing) os << " '" << n << "'";
    os << "; declare free inputs for them";
    throw Error(os.str());
  }
  Assignment out;
  for (std::size_t p = 0; p < result->size(); ++p)
    out[net.reg.node(p)] = static_cast<int>((*result)[p]);
  return out;
}

StateVector prepare_initial_state(const BooleanNetwork& net, const Assignment& input) {
  return basis_ket(net.reg, assignment_index(net, classical_propagate(net, input)));
}

Subspace gate_subspace(const Gate& g, const Register& reg) {
  std::vector<std::size_t> shifts;
  for (const auto& n : g.nodes) shifts.push_back(reg.size() - 1 - reg.position_of(n));
  std::vector<char> admitted(std::size_t{1} << g.arity(), 0);
  for (auto e : g.eigenstates) admitted[e] = 1;
  std::vector<std::uint64_t> kets;
  for (std::uint64_t ket = 0; ket < reg.dim(); ++ket) {
    std::uint32_t pattern = 0;
    for (std::size_t s : shifts) pattern = (pattern << 1) | ((ket >> s) & 1u);
    if (admitted[pattern]) kets.push_back(ket);
  }
  if (kets.empty()) throw Error("gate subspace is empty");
  return Subspace::from_kets(reg, std::move(kets));
}

}  // namespace qreduct
