#include <doctest.h>

#include <random>
#include <set>

#include "fluxq/topology.hpp"
#include "support.hpp"

using namespace fluxq;

namespace {

std::vector<std::string> ids(const Circuit& c, const std::vector<std::size_t>& idx) {
  std::vector<std::string> out;
  for (auto i : idx) out.push_back(c.components()[i].id);
  return out;
}

using Path = std::vector<std::pair<std::string, int>>;

Path path_of(const Circuit& c, const FundamentalLoop& loop) {
  Path out;
  for (const auto& b : loop.path) out.emplace_back(c.components()[b.component].id, b.sign);
  return out;
}

void check_tree_invariants(const Circuit& c, const SpanningTree& t) {
  CHECK(t.tree.size() == c.node_count() - 1);
  std::set<std::size_t> all(t.tree.begin(), t.tree.end());
  all.insert(t.chords.begin(), t.chords.end());
  CHECK(all.size() == c.component_count());
  CHECK(t.tree.size() + t.chords.size() == c.component_count());
  // Acyclic and spanning: union-find over tree edges merges every node exactly once.
  std::vector<std::size_t> parent(c.node_count());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (auto i : t.tree) {
    const auto a = find(c.node_index(c.components()[i].node_a));
    const auto b = find(c.node_index(c.components()[i].node_b));
    CHECK(a != b);
    parent[a] = b;
  }
  for (std::size_t i = 1; i < parent.size(); ++i) CHECK(find(i) == find(0));
}

Circuit permuted(const Circuit& c, std::mt19937_64& rng) {
  auto comps = c.components();
  std::shuffle(comps.begin(), comps.end(), rng);
  Circuit out;
  for (const auto& comp : comps) out.add_component(comp);
  return out;
}

}  // namespace

TEST_CASE("spanning trees of the fixtures") {
  const auto fig2b = support::load("fig2b");
  auto t = build_spanning_tree(fig2b);
  CHECK(ids(fig2b, t.tree) == std::vector<std::string>{"C"});
  CHECK(ids(fig2b, t.chords) == std::vector<std::string>{"L"});

  const auto fig2a = support::load("fig2a");
  t = build_spanning_tree(fig2a);
  CHECK(ids(fig2a, t.tree) == std::vector<std::string>{"C1", "L3"});
  CHECK(ids(fig2a, t.chords) == std::vector<std::string>{"C2", "L4"});
  check_tree_invariants(fig2a, t);

  const auto wheel = support::load("wheel");
  t = build_spanning_tree(wheel);
  CHECK(t.tree.size() == 3);
  CHECK(t.chords.size() == 3);
  check_tree_invariants(wheel, t);
}

TEST_CASE("fundamental loops") {
  const auto fig2a = support::load("fig2a");
  const auto loops = fundamental_loops(fig2a, build_spanning_tree(fig2a));
  REQUIRE(loops.size() == 2);
  CHECK(path_of(fig2a, loops[0]) == Path{{"C2", 1}, {"C1", -1}});
  CHECK(path_of(fig2a, loops[1]) == Path{{"L4", 1}, {"C1", -1}, {"L3", 1}});

  const auto fig2b = support::load("fig2b");
  CHECK(fundamental_loops(fig2b, build_spanning_tree(fig2b)).size() == 1);
  const auto wheel = support::load("wheel");
  CHECK(fundamental_loops(wheel, build_spanning_tree(wheel)).size() == 3);
}

TEST_CASE("every fundamental loop closes") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    const auto c = support::random_active_circuit(rng);
    const auto t = build_spanning_tree(c);
    check_tree_invariants(c, t);
    for (const auto& loop : fundamental_loops(c, t)) {
      CHECK(loop.path.front().component == loop.chord);
      CHECK(loop.path.front().sign == 1);
      std::vector<int> net(c.node_count(), 0);
      for (const auto& b : loop.path) {
        const auto& comp = c.components()[b.component];
        net[c.node_index(comp.node_a)] -= b.sign;
        net[c.node_index(comp.node_b)] += b.sign;
      }
      CHECK(std::all_of(net.begin(), net.end(), [](int x) { return x == 0; }));
    }
  }
}

TEST_CASE("passive nodes") {
  CHECK(passive_nodes(support::load("fig2a")) == std::vector<std::string>{"3"});
  CHECK(passive_nodes(support::load("fig2b")).empty());
  CHECK(passive_nodes(support::load("wheel")) == std::vector<std::string>{"4"});
}

TEST_CASE("passive loop deficiency") {
  for (auto [name, expected] : {std::pair{"fig2a", 1}, {"fig2b", 0}, {"wheel", 1}, {"fig1a", 0}}) {
    const auto c = support::load(name);
    const auto d = passive_loop_deficiency(c, fundamental_loops(c, build_spanning_tree(c)));
    CHECK_MESSAGE(d.deficiency == static_cast<std::size_t>(expected), name);
    CHECK(d.numeric_deficiency == d.deficiency);
    CHECK(d.witnesses.size() == d.deficiency);
  }
}

TEST_CASE("deficiency does not depend on the spanning tree") {
  std::mt19937_64 rng(99);
  for (const char* name : {"fig2a", "fig2b", "wheel", "fig1a"}) {
    const auto c = support::load(name);
    const auto base = passive_loop_deficiency(c, fundamental_loops(c, build_spanning_tree(c))).deficiency;
    for (int k = 0; k < 20; ++k) {
      const auto p = permuted(c, rng);
      CHECK(passive_loop_deficiency(p, fundamental_loops(p, build_spanning_tree(p))).deficiency == base);
    }
  }
  // Random circuits with capacitor-only loops mixed in.
  std::uniform_int_distribution<int> coin(0, 2);
  for (int trial = 0; trial < 30; ++trial) {
    Circuit c;
    const auto base_circuit = support::random_active_circuit(rng);
    for (const auto& comp : base_circuit.components()) {
      auto x = comp;
      if (x.is_inductor() && coin(rng) == 0) x.kind = ComponentKind::Capacitor;
      c.add_component(x);
    }
    const auto base = passive_loop_deficiency(c, fundamental_loops(c, build_spanning_tree(c))).deficiency;
    for (int k = 0; k < 5; ++k) {
      const auto p = permuted(c, rng);
      CHECK(passive_loop_deficiency(p, fundamental_loops(p, build_spanning_tree(p))).deficiency == base);
    }
  }
}

TEST_CASE("reduction of FIG2A gives FIG2B") {
  const auto red = reduce_circuit(support::load("fig2a"));
  REQUIRE(red.changed());
  REQUIRE(red.circuit.component_count() == 2);
  const auto& cs = red.circuit.components();
  const auto& cap = cs[0].is_capacitor() ? cs[0] : cs[1];
  const auto& ind = cs[0].is_capacitor() ? cs[1] : cs[0];
  CHECK(cap.value == doctest::Approx(6e-12).epsilon(1e-14));
  CHECK(ind.value == doctest::Approx(4e-9).epsilon(1e-14));
  CHECK(red.circuit.node_count() == 2);

  REQUIRE(red.merges.size() == 2);
  CHECK(red.merges[0].kind == Merge::Kind::Parallel);
  CHECK(red.merges[0].members == std::vector<MergeMember>{{"C1", 1}, {"C2", 1}});
  CHECK(red.merges[1].kind == Merge::Kind::Series);
  CHECK(red.merges[1].members == std::vector<MergeMember>{{"L3", 1}, {"L4", 1}});
}

TEST_CASE("reduction is idempotent") {
  std::mt19937_64 rng(5);
  std::vector<Circuit> circuits{support::load("fig2a"), support::load("fig2b"), support::load("wheel"),
                                support::load("fig1a")};
  for (int i = 0; i < 40; ++i) circuits.push_back(support::random_active_circuit(rng));
  for (const auto& c : circuits) {
    const auto once = reduce_circuit(c);
    const auto twice = reduce_circuit(once.circuit);
    CHECK_FALSE(twice.changed());
    CHECK(twice.circuit == once.circuit);
  }
}

TEST_CASE("topology reports") {
  auto r = analyze_topology(support::load("fig2a"));
  CHECK(r.n == 3);
  CHECK(r.c == 4);
  CHECK(r.l == 2);
  CHECK(r.passive_nodes == std::vector<std::string>{"3"});
  CHECK(r.loop_deficiency.deficiency == 1);
  CHECK(r.reducible);

  r = analyze_topology(support::load("wheel"));
  CHECK(r.passive_nodes == std::vector<std::string>{"4"});
  CHECK(r.loop_deficiency.deficiency == 1);
  CHECK_FALSE(r.reducible);
  CHECK_FALSE(reduce_circuit(support::load("wheel")).changed());

  r = analyze_topology(support::load("fig2b"));
  CHECK(r.loop_deficiency.deficiency == 0);
  CHECK_FALSE(r.reducible);
}

TEST_CASE("exact rank and null space") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 1, 0, 1;
  CHECK(exact_rank(a) == 2);
  const auto ns = exact_null_space(a);
  REQUIRE(ns.size() == 1);
  CHECK((a * ns[0]).norm() == 0.0);
  CHECK(exact_rank(Eigen::MatrixXd::Zero(2, 3)) == 0);
  CHECK(exact_null_space(Eigen::MatrixXd::Identity(3, 3)).empty());
  Eigen::MatrixXd frac(1, 2);
  frac << 0.5, 1;
  CHECK_THROWS_AS(exact_rank(frac), std::invalid_argument);
}

TEST_CASE("disconnected circuits are rejected") {
  const auto c = parse_netlist("C1 1 0 1pF\nL1 1 0 1nH\nC2 2 3 1pF\nL2 2 3 1nH\n");
  CHECK_THROWS_AS(build_spanning_tree(c), TopologyError);
}
