#include "fluxq/topology.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <optional>

#include <boost/rational.hpp>

namespace fluxq {

namespace {

using Rational = boost::rational<long long>;
using RationalMatrix = std::vector<std::vector<Rational>>;

RationalMatrix to_rational(const Eigen::MatrixXd& m) {
  RationalMatrix out(m.rows(), std::vector<Rational>(m.cols()));
  for (Eigen::Index i = 0; i < m.rows(); ++i)
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      const double v = m(i, j);
      if (v != std::round(v)) throw std::invalid_argument("exact_rank: non-integer entry");
      out[i][j] = Rational(static_cast<long long>(v));
    }
  return out;
}

// Reduced row echelon form in place; returns pivot columns.
std::vector<std::size_t> rref(RationalMatrix& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t p = row;
    while (p < a.size() && a[p][col].numerator() == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const Rational inv = Rational(1) / a[row][col];
    for (auto& x : a[row]) x *= inv;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][col].numerator() == 0) continue;
      const Rational f = a[r][col];
      for (std::size_t k = 0; k < cols; ++k) a[r][k] -= f * a[row][k];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

struct Incidence {
  // Per node: list of (component index, other node index).
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj;
};

Incidence incidence(const Circuit& circuit) {
  Incidence inc;
  inc.adj.resize(circuit.node_count());
  const auto& comps = circuit.components();
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const std::size_t a = circuit.node_index(comps[i].node_a);
    const std::size_t b = circuit.node_index(comps[i].node_b);
    inc.adj[a].emplace_back(i, b);
    inc.adj[b].emplace_back(i, a);
  }
  return inc;
}

}  // namespace

std::size_t exact_rank(const Eigen::MatrixXd& integer_matrix) {
  auto a = to_rational(integer_matrix);
  return rref(a, integer_matrix.cols()).size();
}

std::vector<Eigen::VectorXd> exact_null_space(const Eigen::MatrixXd& integer_matrix) {
  const std::size_t cols = integer_matrix.cols();
  auto a = to_rational(integer_matrix);
  const auto pivots = rref(a, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;

  std::vector<Eigen::VectorXd> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    Eigen::VectorXd v = Eigen::VectorXd::Zero(cols);
    v(free) = 1.0;
    for (std::size_t r = 0; r < pivots.size(); ++r)
      v(pivots[r]) = -boost::rational_cast<double>(a[r][free]);
    basis.push_back(v);
  }
  return basis;
}

SpanningTree build_spanning_tree(const Circuit& circuit) {
  const auto& comps = circuit.components();
  const std::size_t n = circuit.node_count();
  std::vector<bool> in_tree(n, false);
  std::vector<bool> used(comps.size(), false);
  in_tree[0] = true;

  std::vector<std::size_t> ends_a(comps.size()), ends_b(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    ends_a[i] = circuit.node_index(comps[i].node_a);
    ends_b[i] = circuit.node_index(comps[i].node_b);
  }

  SpanningTree st;
  for (std::size_t added = 1; added < n; ++added) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (in_tree[ends_a[i]] == in_tree[ends_b[i]]) continue;
      if (!best || (comps[i].is_capacitor() && !comps[*best].is_capacitor())) best = i;
    }
    if (!best) {
      std::string msg = "circuit is not connected; unreachable nodes:";
      for (std::size_t k = 0; k < n; ++k)
        if (!in_tree[k]) msg += " " + circuit.nodes()[k];
      throw TopologyError(msg);
    }
    in_tree[ends_a[*best]] = true;
    in_tree[ends_b[*best]] = true;
    used[*best] = true;
    st.tree.push_back(*best);
  }
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (!used[i]) st.chords.push_back(i);
  return st;
}

std::vector<FundamentalLoop> fundamental_loops(const Circuit& circuit, const SpanningTree& tree) {
  const auto& comps = circuit.components();
  const std::size_t n = circuit.node_count();

  // Root the tree at ground: parent edge and depth per node.
  std::vector<std::vector<std::size_t>> tree_adj(n);
  for (auto ci : tree.tree) {
    tree_adj[circuit.node_index(comps[ci].node_a)].push_back(ci);
    tree_adj[circuit.node_index(comps[ci].node_b)].push_back(ci);
  }
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<std::size_t> parent_edge(n, kNone), parent(n, kNone), depth(n, 0);
  std::vector<bool> seen(n, false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (auto ci : tree_adj[u]) {
      const std::size_t a = circuit.node_index(comps[ci].node_a);
      const std::size_t v = a == u ? circuit.node_index(comps[ci].node_b) : a;
      if (seen[v]) continue;
      seen[v] = true;
      parent[v] = u;
      parent_edge[v] = ci;
      depth[v] = depth[u] + 1;
      stack.push_back(v);
    }
  }

  // Sign of traversing tree edge ci from node `from`.
  auto sign_from = [&](std::size_t ci, std::size_t from) {
    return circuit.node_index(comps[ci].node_a) == from ? 1 : -1;
  };

  std::vector<FundamentalLoop> loops;
  for (auto chord : tree.chords) {
    FundamentalLoop loop{chord, {{chord, 1}}};
    std::size_t u = circuit.node_index(comps[chord].node_b);  // walk from b ...
    std::size_t w = circuit.node_index(comps[chord].node_a);  // ... back to a
    std::vector<LoopBranch> up, down;
    while (depth[u] > depth[w]) {
      up.push_back({parent_edge[u], sign_from(parent_edge[u], u)});
      u = parent[u];
    }
    while (depth[w] > depth[u]) {
      down.push_back({parent_edge[w], -sign_from(parent_edge[w], w)});
      w = parent[w];
    }
    while (u != w) {
      up.push_back({parent_edge[u], sign_from(parent_edge[u], u)});
      u = parent[u];
      down.push_back({parent_edge[w], -sign_from(parent_edge[w], w)});
      w = parent[w];
    }
    loop.path.insert(loop.path.end(), up.begin(), up.end());
    loop.path.insert(loop.path.end(), down.rbegin(), down.rend());
    loops.push_back(std::move(loop));
  }
  return loops;
}

std::vector<std::string> passive_nodes(const Circuit& circuit) {
  std::vector<bool> has_cap(circuit.node_count(), false);
  for (const auto& c : circuit.components()) {
    if (!c.is_capacitor()) continue;
    has_cap[circuit.node_index(c.node_a)] = true;
    has_cap[circuit.node_index(c.node_b)] = true;
  }
  std::vector<std::string> out;
  for (std::size_t i = 1; i < circuit.node_count(); ++i)
    if (!has_cap[i]) out.push_back(circuit.nodes()[i]);
  return out;
}

std::vector<std::vector<std::size_t>> capacitively_floating_groups(const Circuit& circuit) {
  const std::size_t n = circuit.node_count();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& c : circuit.components())
    if (c.is_capacitor())
      parent[find(circuit.node_index(c.node_a))] = find(circuit.node_index(c.node_b));

  std::map<std::size_t, std::vector<std::size_t>> groups;
  for (std::size_t i = 1; i < n; ++i)
    if (find(i) != find(0)) groups[find(i)].push_back(i);

  std::vector<std::vector<std::size_t>> out;
  for (auto& [root, members] : groups) out.push_back(std::move(members));
  std::sort(out.begin(), out.end());
  return out;
}

Eigen::MatrixXd loop_inductor_incidence(const Circuit& circuit,
                                        const std::vector<FundamentalLoop>& loops) {
  const auto& comps = circuit.components();
  std::vector<std::size_t> inductors;
  std::vector<std::size_t> column(comps.size(), 0);
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (comps[i].is_inductor()) {
      column[i] = inductors.size();
      inductors.push_back(i);
    }
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(loops.size(), inductors.size());
  for (std::size_t l = 0; l < loops.size(); ++l)
    for (const auto& br : loops[l].path)
      if (comps[br.component].is_inductor()) b(l, column[br.component]) += br.sign;
  return b;
}

LoopDeficiency passive_loop_deficiency(const Circuit& circuit,
                                       const std::vector<FundamentalLoop>& loops) {
  LoopDeficiency out;
  const std::size_t l = loops.size();
  if (l == 0) return out;

  const Eigen::MatrixXd b = loop_inductor_incidence(circuit, loops);
  out.deficiency = l - exact_rank(b);
  out.witnesses = exact_null_space(b.transpose());

  Eigen::VectorXd inductances(b.cols());
  std::size_t k = 0;
  for (const auto& c : circuit.components())
    if (c.is_inductor()) inductances(k++) = c.value;
  const Eigen::MatrixXd w = b * inductances.asDiagonal() * b.transpose();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(w);
  const auto& s = svd.singularValues();
  const double smax = s.size() ? s.maxCoeff() : 0.0;
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (smax > 0.0 && s(i) >= 1e-12 * smax) ++rank;
  out.numeric_deficiency = l - rank;
  return out;
}

namespace {

std::string join_ids(const std::vector<MergeMember>& members, char sep) {
  std::string out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    if (i) out += sep;
    out += members[i].id;
  }
  return out;
}

// Rebuild with the given components, dropping nodes listed in `drop`.
Circuit rebuild(const Circuit& original, const std::vector<Component>& comps,
                const std::vector<std::string>& drop, const std::map<std::string, double>& ics) {
  Circuit out;
  for (std::size_t i = 1; i < original.node_count(); ++i) {
    const auto& name = original.nodes()[i];
    if (std::find(drop.begin(), drop.end(), name) == drop.end()) out.add_node(name);
  }
  for (const auto& c : comps) out.add_component(c);
  for (const auto& [id, v] : ics) out.set_initial_condition(id, v);
  return out;
}

// Merged initial condition, or nullopt when any member lacks one.
std::optional<double> merged_ic(const Circuit& circuit, const Merge& m, ComponentKind kind) {
  const auto& ics = circuit.initial_conditions();
  std::vector<double> vals;
  for (const auto& mem : m.members) {
    auto it = ics.find(mem.id);
    if (it == ics.end()) return std::nullopt;
    vals.push_back(mem.sign * it->second);
  }
  // Parallel inductors split current; parallel capacitors and series
  // inductors share one voltage / current.
  if (m.kind == Merge::Kind::Parallel && kind == ComponentKind::Inductor)
    return std::accumulate(vals.begin(), vals.end(), 0.0);
  return vals.front();
}

bool merge_parallel(Circuit& circuit, std::vector<Merge>& merges) {
  const auto& comps = circuit.components();
  std::vector<bool> consumed(comps.size(), false);
  std::vector<Component> out;
  std::map<std::string, double> ics = circuit.initial_conditions();
  bool changed = false;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    if (consumed[i]) continue;
    const auto& first = comps[i];
    Merge m{Merge::Kind::Parallel, "", {{first.id, 1}}};
    double acc = first.is_capacitor() ? first.value : 1.0 / first.value;
    for (std::size_t j = i + 1; j < comps.size(); ++j) {
      const auto& c = comps[j];
      if (consumed[j] || c.kind != first.kind) continue;
      int sign = 0;
      if (c.node_a == first.node_a && c.node_b == first.node_b) sign = 1;
      if (c.node_a == first.node_b && c.node_b == first.node_a) sign = -1;
      if (!sign) continue;
      consumed[j] = true;
      m.members.push_back({c.id, sign});
      acc += c.is_capacitor() ? c.value : 1.0 / c.value;
    }
    if (m.members.size() == 1) {
      out.push_back(first);
      continue;
    }
    changed = true;
    m.result_id = join_ids(m.members, '|');
    Component merged = first;
    merged.id = m.result_id;
    merged.value = first.is_capacitor() ? acc : 1.0 / acc;
    merged.geometric = false;
    auto ic = merged_ic(circuit, m, first.kind);
    for (const auto& mem : m.members) ics.erase(mem.id);
    if (ic) ics[m.result_id] = *ic;
    out.push_back(merged);
    merges.push_back(std::move(m));
  }
  if (changed) circuit = rebuild(circuit, out, {}, ics);
  return changed;
}

bool eliminate_one_series_node(Circuit& circuit, std::vector<Merge>& merges) {
  const auto passive = passive_nodes(circuit);
  const auto& comps = circuit.components();
  for (const auto& name : passive) {
    std::vector<std::size_t> incident;
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (comps[i].node_a == name || comps[i].node_b == name) incident.push_back(i);
    if (incident.size() != 2) continue;
    const auto& c1 = comps[incident[0]];
    const auto& c2 = comps[incident[1]];
    const std::string u = c1.node_a == name ? c1.node_b : c1.node_a;
    const std::string w = c2.node_a == name ? c2.node_b : c2.node_a;
    if (u == w) continue;

    // Passive nodes only touch inductors, so this is a series inductor chain u -> name -> w.
    Merge m{Merge::Kind::Series, "",
            {{c1.id, c1.node_a == u ? 1 : -1}, {c2.id, c2.node_a == name ? 1 : -1}}};
    m.result_id = join_ids(m.members, '+');
    Component merged{m.result_id, ComponentKind::Inductor, c1.value + c2.value, u, w, false};

    std::map<std::string, double> ics = circuit.initial_conditions();
    auto ic = merged_ic(circuit, m, ComponentKind::Inductor);
    ics.erase(c1.id);
    ics.erase(c2.id);
    if (ic) ics[m.result_id] = *ic;

    std::vector<Component> out;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (i == incident[0]) out.push_back(merged);
      else if (i != incident[1]) out.push_back(comps[i]);
    }
    circuit = rebuild(circuit, out, {name}, ics);
    merges.push_back(std::move(m));
    return true;
  }
  return false;
}

}  // namespace

Reduction reduce_circuit(const Circuit& circuit) {
  Reduction r{circuit, {}};
  bool progress = true;
  while (progress) {
    progress = merge_parallel(r.circuit, r.merges);
    progress = eliminate_one_series_node(r.circuit, r.merges) || progress;
  }
  return r;
}

TopologyReport analyze_topology(const Circuit& circuit) {
  TopologyReport rep;
  rep.n = circuit.node_count();
  rep.c = circuit.component_count();
  rep.tree = build_spanning_tree(circuit);
  rep.loops = fundamental_loops(circuit, rep.tree);
  rep.l = rep.loops.size();
  rep.passive_nodes = passive_nodes(circuit);
  rep.loop_deficiency = passive_loop_deficiency(circuit, rep.loops);

  const Reduction red = reduce_circuit(circuit);
  if (red.changed()) {
    const auto& rc = red.circuit;
    const bool node_ok = capacitively_floating_groups(rc).empty();
    const auto loops = fundamental_loops(rc, build_spanning_tree(rc));
    const bool loop_ok = passive_loop_deficiency(rc, loops).deficiency == 0;
    rep.reducible = node_ok || loop_ok;
  }
  return rep;
}

}  // namespace fluxq
