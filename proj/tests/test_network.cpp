#include "qreduct/network.hpp"

#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <string>

using namespace qreduct;

namespace {

BooleanNetwork cnot_wire_network(Assignment pins, std::vector<NodeLabel> free_inputs) {
  return make_network({"t", "u", "v", "r", "s"}, {cnot_gate("t", "u", "v", "r")}, {{"r", "s"}},
                      std::move(pins), std::move(free_inputs));
}

// Truth check of the copying controlled-NOT, written out independently of
// the gate constructors: v copies t, r = t XOR u.
bool cnot_truth(std::uint32_t e) {
  const int t = (e >> 3) & 1, u = (e >> 2) & 1, v = (e >> 1) & 1, r = e & 1;
  return v == t && r == (t ^ u);
}

}  // namespace

TEST_CASE("gate constructors admit exactly the right patterns") {
  SUBCASE("copying controlled-NOT") {
    const Gate g = cnot_gate("t", "u", "v", "r");
    CHECK(g.kind == "cnot");
    CHECK(g.arity() == 4);
    CHECK(g.eigenstates == std::vector<std::uint32_t>{0, 5, 11, 14});
    for (std::uint32_t e = 0; e < 16; ++e)
      CHECK(std::binary_search(g.eigenstates.begin(), g.eigenstates.end(), e) == cnot_truth(e));
  }
  SUBCASE("two-node disagreement") {
    const Gate g = not_gate("a", "b");
    CHECK(g.eigenstates == std::vector<std::uint32_t>{1, 2});
  }
  SUBCASE("copying Toffoli") {
    const Gate g = toffoli_gate("a", "b", "c", "ao", "bo", "co");
    CHECK(g.arity() == 6);
    REQUIRE(g.eigenstates.size() == 8);
    for (std::uint32_t e : g.eigenstates) {
      const int a = (e >> 5) & 1, b = (e >> 4) & 1, c = (e >> 3) & 1;
      const int ao = (e >> 2) & 1, bo = (e >> 1) & 1, co = e & 1;
      CHECK(ao == a);
      CHECK(bo == b);
      CHECK(co == (c ^ (a & b)));
    }
  }
  SUBCASE("explicit tables") {
    const Gate g = table_gate({"a", "b"}, {"01", "10"});
    CHECK(g.eigenstates == std::vector<std::uint32_t>{1, 2});
    CHECK_THROWS_AS(table_gate({"a", "b"}, {"01", "01"}), Error);
    CHECK_THROWS_AS(table_gate({"a", "b"}, {"011"}), Error);
    CHECK_THROWS_AS(table_gate({"a", "b"}, {"0x"}), Error);
    CHECK_THROWS_AS(table_gate({"a", "b"}, {}), Error);
    CHECK_THROWS_AS(table_gate({"a", "a"}, {"01"}), Error);
  }
}

TEST_CASE("network assembly validates its pieces") {
  CHECK_THROWS_AS(make_network({"r"}, {}, {{"r", "s"}}, {}, {}), Error);
  CHECK_THROWS_AS(make_network({"r", "s"}, {not_gate("r", "x")}, {}, {}, {}), Error);
  CHECK_THROWS_AS(make_network({"r", "s"}, {}, {}, {{"x", 1}}, {}), Error);
  CHECK_THROWS_AS(make_network({"r", "s"}, {}, {}, {{"r", 2}}, {}), Error);
  CHECK_THROWS_AS(make_network({"r", "s"}, {}, {}, {}, {"x"}), Error);
  CHECK_THROWS_AS(make_network({"r", "s"}, {}, {}, {}, {"r", "r"}), Error);
  // A node cannot be both pinned and free.
  CHECK_THROWS_AS(make_network({"r", "s"}, {}, {}, {{"r", 1}}, {"r"}), Error);
  // Dense-register cap.
  CHECK_THROWS_AS(make_network({"a", "b", "c", "d"}, {}, {}, {}, {}, 3), Error);
  CHECK_NOTHROW(make_network({"a", "b", "c", "d"}, {}, {}, {}, {}, 4));
}

TEST_CASE("register cap from the environment") {
  unsetenv("QREDUCT_CAP");
  CHECK(register_cap_from_env() == 14);
  setenv("QREDUCT_CAP", "7", 1);
  CHECK(register_cap_from_env() == 7);
  setenv("QREDUCT_CAP", "abc", 1);
  CHECK_THROWS_AS(register_cap_from_env(), Error);
  setenv("QREDUCT_CAP", "0", 1);
  CHECK_THROWS_AS(register_cap_from_env(), Error);
  unsetenv("QREDUCT_CAP");
}

TEST_CASE("consistent assignments of the five-node network") {
  SUBCASE("unpinned enumeration matches a brute-force scan") {
    const BooleanNetwork net = cnot_wire_network({}, {});
    std::vector<std::uint64_t> brute;
    for (std::uint64_t ket = 0; ket < 32; ++ket) {
      const int r = (ket >> 1) & 1, s = ket & 1;
      if (cnot_truth(static_cast<std::uint32_t>(ket >> 1)) && r != s) brute.push_back(ket);
    }
    CHECK(brute == std::vector<std::uint64_t>{1, 10, 22, 29});
    CHECK(consistent_kets(net, false) == brute);
    CHECK(consistent_assignments(net, false).size() == 4);
  }
  SUBCASE("pins select the unique solution") {
    const BooleanNetwork net = cnot_wire_network({{"u", 1}, {"s", 1}}, {"t"});
    const auto sols = consistent_assignments(net, true);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0] == Assignment{{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 1}});
    CHECK(consistent_kets(net, true) == std::vector<std::uint64_t>{29});
  }
  SUBCASE("pinning both wire ends equal leaves nothing") {
    const BooleanNetwork net =
        make_network({"r", "s"}, {}, {{"r", "s"}}, {{"r", 0}, {"s", 0}}, {});
    CHECK(consistent_kets(net, true).empty());
    CHECK(consistent_kets(net, false) == std::vector<std::uint64_t>{1, 2});
  }
  SUBCASE("pinned solutions are a subset of unpinned ones and all verify") {
    const BooleanNetwork net = cnot_wire_network({{"u", 1}, {"s", 1}}, {"t"});
    const auto all = consistent_kets(net, false);
    CHECK(std::is_sorted(all.begin(), all.end()));
    for (auto k : consistent_kets(net, true)) {
      CHECK(std::binary_search(all.begin(), all.end(), k));
      CHECK(verify_solution(net, index_assignment(net, k)));
    }
  }
}

TEST_CASE("solution verification") {
  const BooleanNetwork net = cnot_wire_network({{"u", 1}, {"s", 1}}, {"t"});
  CHECK(verify_solution(net, {{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 1}}));
  // Pin violation (gates and wire hold, but u = 0).
  CHECK_FALSE(verify_solution(net, {{"t", 0}, {"u", 0}, {"v", 0}, {"r", 0}, {"s", 1}}));
  // Gate violation (v fails to copy t).
  CHECK_FALSE(verify_solution(net, {{"t", 1}, {"u", 1}, {"v", 0}, {"r", 0}, {"s", 1}}));
  // Wire violation (both ends agree).
  CHECK_FALSE(verify_solution(net, {{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 0}}));
  // Malformed candidates are simply not solutions.
  CHECK_FALSE(verify_solution(net, {{"t", 1}}));
  CHECK_FALSE(verify_solution(net, {{"t", 1}, {"u", 1}, {"v", 1}, {"r", 3}, {"s", 1}}));
}

TEST_CASE("assignment indexing round trips") {
  const BooleanNetwork net = cnot_wire_network({}, {});
  for (std::uint64_t idx = 0; idx < 32; ++idx)
    CHECK(assignment_index(net, index_assignment(net, idx)) == idx);
  CHECK(assignment_index(net, {{"t", 0}, {"u", 1}, {"v", 0}, {"r", 1}, {"s", 0}}) == 10);
}

TEST_CASE("forward propagation of a classical input") {
  const BooleanNetwork net = cnot_wire_network({}, {"t", "u"});
  SUBCASE("inputs flow through the gate and the wire") {
    CHECK(classical_propagate(net, {{"t", 0}, {"u", 1}}) ==
          Assignment{{"t", 0}, {"u", 1}, {"v", 0}, {"r", 1}, {"s", 0}});
    CHECK(classical_propagate(net, {{"t", 1}, {"u", 1}}) ==
          Assignment{{"t", 1}, {"u", 1}, {"v", 1}, {"r", 0}, {"s", 1}});
  }
  SUBCASE("a constraint-free network echoes its input") {
    const BooleanNetwork loose = make_network({"a"}, {}, {}, {}, {"a"});
    CHECK(classical_propagate(loose, {{"a", 1}}) == Assignment{{"a", 1}});
  }
  SUBCASE("an undetermined node is reported by name") {
    try {
      classical_propagate(net, {{"t", 0}});
      FAIL("expected an error");
    } catch (const Error& e) {
      const std::string msg = e.what();
      CHECK(msg.find("does not determine") != std::string::npos);
      CHECK(msg.find("'u'") != std::string::npos);
    }
  }
  SUBCASE("a contradictory input is rejected") {
    CHECK_THROWS_AS(classical_propagate(net, Assignment{{"t", 0}, {"u", 0}, {"r", 1}}), Error);
    CHECK_THROWS_AS(classical_propagate(net, {{"x", 1}}), Error);
  }
}

TEST_CASE("partial propagation reaches the constraint fixpoint") {
  const BooleanNetwork net = cnot_wire_network({}, {});
  SUBCASE("forced bits are filled in, genuinely open ones are not") {
    PartialAssignment partial(5, -1);
    partial[0] = 1;  // t
    const auto out = propagate_partial(net, partial);
    REQUIRE(out.has_value());
    CHECK((*out)[0] == 1);   // t kept
    CHECK((*out)[2] == 1);   // v copies t in every surviving row
    CHECK((*out)[1] == -1);  // u stays open
    CHECK((*out)[3] == -1);  // r depends on u
    CHECK((*out)[4] == -1);  // s depends on r
  }
  SUBCASE("contradictions yield no fixpoint") {
    PartialAssignment partial(5, -1);
    partial[3] = 1;  // r
    partial[4] = 1;  // s = r violates the wire
    CHECK_FALSE(propagate_partial(net, partial).has_value());
  }
  SUBCASE("width is checked") {
    CHECK_THROWS_AS(propagate_partial(net, PartialAssignment(3, -1)), Error);
  }
}

TEST_CASE("preparation builds the basis ket of the propagated assignment") {
  const BooleanNetwork net = cnot_wire_network({{"u", 1}, {"s", 1}}, {"t"});
  const StateVector v = prepare_initial_state(net, {{"t", 0}, {"u", 1}});
  CHECK(std::abs(v.amplitude("01010") - Complex{1.0, 0.0}) < 1e-15);
  CHECK(v.norm() == doctest::Approx(1.0));
  CHECK(gate_subspace(net.gates[0], net.reg).contains(v));
  // The ket also satisfies the wire (r and s disagree).
  const Gate wire_as_gate = not_gate("r", "s");
  CHECK(gate_subspace(wire_as_gate, net.reg).contains(v));
}

TEST_CASE("gate subspaces have one dimension per admitted pattern") {
  const Register four({"t", "u", "v", "r"});
  CHECK(gate_subspace(cnot_gate("t", "u", "v", "r"), four).dim() == 4);
  const Register five({"t", "u", "v", "r", "x"});
  // An uninvolved node doubles the count.
  CHECK(gate_subspace(cnot_gate("t", "u", "v", "r"), five).dim() == 8);
  const Register two({"a", "b"});
  CHECK(gate_subspace(table_gate({"a", "b"}, {"00", "01", "10", "11"}), two).dim() == 4);
}
