#include "fluxq/lagrangian.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>

#include "fluxq/simulate.hpp"

namespace fluxq {

const char* to_string(Representation rep) {
  switch (rep) {
    case Representation::NodeFlux: return "node";
    case Representation::LoopCharge: return "loop";
    case Representation::ExtendedNodeFlux: return "extended";
  }
  return "?";
}

const char* to_string(GeometricPolicy::Mode mode) {
  switch (mode) {
    case GeometricPolicy::Mode::Off: return "off";
    case GeometricPolicy::Mode::Minimal: return "minimal";
    case GeometricPolicy::Mode::AllPairs: return "allpairs";
  }
  return "?";
}

double Branch::weight() const { return kinetic ? value : 1.0 / value; }

const Branch* QuadraticLagrangian::find_branch(const std::string& id) const {
  for (const auto& b : branches)
    if (b.id == id) return &b;
  return nullptr;
}

void assemble(QuadraticLagrangian& lag) {
  const auto n = static_cast<Eigen::Index>(lag.labels.size());
  lag.mass = Eigen::MatrixXd::Zero(n, n);
  lag.stiffness = Eigen::MatrixXd::Zero(n, n);
  for (const auto& b : lag.branches) {
    auto& target = b.kinetic ? lag.mass : lag.stiffness;
    target.noalias() += b.weight() * b.row * b.row.transpose();
  }
}

namespace {

// Flux row phi_a - phi_b over the non-ground node coordinates.
Eigen::VectorXd node_difference(const Circuit& circuit, const Component& c, Eigen::Index dim) {
  Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
  const std::size_t a = circuit.node_index(c.node_a);
  const std::size_t b = circuit.node_index(c.node_b);
  if (a) row(a - 1) += 1.0;
  if (b) row(b - 1) -= 1.0;
  return row;
}

std::vector<std::string> node_labels(const Circuit& circuit) {
  std::vector<std::string> labels;
  for (std::size_t i = 1; i < circuit.node_count(); ++i) labels.push_back("phi_" + circuit.nodes()[i]);
  return labels;
}

std::pair<std::string, std::string> unordered(const std::string& a, const std::string& b) {
  return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
}

}  // namespace

QuadraticLagrangian node_lagrangian(const Circuit& circuit) {
  QuadraticLagrangian lag{Representation::NodeFlux, node_labels(circuit), {}, {}, {}};
  const auto dim = static_cast<Eigen::Index>(lag.labels.size());
  for (const auto& c : circuit.components())
    lag.branches.push_back(
        {c.id, c.kind, c.value, node_difference(circuit, c, dim), c.is_capacitor(), c.geometric});
  assemble(lag);
  return lag;
}

QuadraticLagrangian loop_lagrangian(const Circuit& circuit,
                                    const std::vector<FundamentalLoop>& loops,
                                    const std::vector<LoopInductance>& self_inductances) {
  QuadraticLagrangian lag{Representation::LoopCharge, {}, {}, {}, {}};
  for (std::size_t l = 0; l < loops.size(); ++l) lag.labels.push_back("Q_" + std::to_string(l + 1));
  const auto dim = static_cast<Eigen::Index>(loops.size());

  const auto& comps = circuit.components();
  std::vector<Eigen::VectorXd> rows(comps.size(), Eigen::VectorXd::Zero(dim));
  for (std::size_t l = 0; l < loops.size(); ++l)
    for (const auto& br : loops[l].path) rows[br.component](l) += br.sign;

  for (std::size_t i = 0; i < comps.size(); ++i)
    lag.branches.push_back({comps[i].id, comps[i].kind, comps[i].value, rows[i],
                            comps[i].is_inductor(), comps[i].geometric});
  for (const auto& li : self_inductances) {
    if (li.loop >= loops.size()) throw std::out_of_range("loop inductance on unknown loop");
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
    row(li.loop) = 1.0;
    lag.branches.push_back({"Lg_" + std::to_string(li.loop + 1), ComponentKind::Inductor, li.value,
                            row, true, true});
  }
  assemble(lag);
  return lag;
}

double GeometricPolicy::capacitance_for(const std::string& a, const std::string& b) const {
  auto it = capacitance_overrides.find(unordered(a, b));
  return it == capacitance_overrides.end() ? default_cg : it->second;
}

double GeometricPolicy::inductance_for(std::size_t loop) const {
  auto it = loop_overrides.find(loop);
  return it == loop_overrides.end() ? default_lg : it->second;
}

namespace {

void add_geometric_capacitor(Augmentation& aug, const GeometricPolicy& policy,
                             const std::string& a, const std::string& b) {
  const std::string id = "Cg_" + a + "_" + b;
  aug.circuit.add_component({id, ComponentKind::Capacitor, policy.capacitance_for(a, b), a, b, true});
  aug.added_capacitors.push_back(id);
}

void minimal_capacitors(Augmentation& aug, const GeometricPolicy& policy, const Circuit& design) {
  auto floating_set = [&] {
    std::set<std::size_t> s;
    for (const auto& g : capacitively_floating_groups(aug.circuit)) s.insert(g.begin(), g.end());
    return s;
  };

  std::vector<std::set<std::size_t>> neighbours(design.node_count());
  for (const auto& c : design.components()) {
    const auto a = design.node_index(c.node_a);
    const auto b = design.node_index(c.node_b);
    neighbours[a].insert(b);
    neighbours[b].insert(a);
  }

  const auto& names = design.nodes();
  for (auto floating = floating_set(); !floating.empty(); floating = floating_set()) {
    bool progress = false;
    for (std::size_t node : std::set<std::size_t>(floating)) {
      if (!floating.count(node)) continue;
      std::optional<std::size_t> target;
      for (std::size_t nb : neighbours[node])
        if (nb != 0 && !floating.count(nb)) {
          target = nb;
          break;
        }
      if (!target && neighbours[node].count(0)) target = 0;
      if (!target) continue;
      add_geometric_capacitor(aug, policy, names[node], names[*target]);
      floating = floating_set();
      progress = true;
    }
    if (!progress) add_geometric_capacitor(aug, policy, names[*floating.begin()], names[0]);
  }
}

void minimal_inductances(Augmentation& aug, const GeometricPolicy& policy, const Circuit& design) {
  const Eigen::MatrixXd b = loop_inductor_incidence(design, aug.loops);
  const auto l = static_cast<Eigen::Index>(aug.loops.size());
  std::size_t rank = exact_rank(b);
  Eigen::MatrixXd cols = b;
  for (Eigen::Index k = 0; k < l && rank < aug.loops.size(); ++k) {
    Eigen::MatrixXd trial(l, cols.cols() + 1);
    trial << cols, Eigen::VectorXd::Unit(l, k);
    const std::size_t r = exact_rank(trial);
    if (r > rank) {
      cols = trial;
      rank = r;
      aug.loop_inductances.push_back({static_cast<std::size_t>(k), policy.inductance_for(k)});
    }
  }
}

}  // namespace

Augmentation augment_geometric(const Circuit& circuit, const GeometricPolicy& policy) {
  Augmentation aug;
  aug.design = circuit;
  aug.circuit = circuit;
  aug.design_components = circuit.component_count();
  aug.tree = build_spanning_tree(circuit);
  aug.loops = fundamental_loops(circuit, aug.tree);

  using Mode = GeometricPolicy::Mode;
  if (policy.mode != Mode::Off && (!(policy.default_cg > 0.0) || !(policy.default_lg > 0.0)))
    throw std::invalid_argument("geometric component values must be positive");

  switch (policy.mode) {
    case Mode::Off:
      break;
    case Mode::Minimal:
      minimal_capacitors(aug, policy, circuit);
      minimal_inductances(aug, policy, circuit);
      break;
    case Mode::AllPairs: {
      const auto& names = circuit.nodes();
      for (std::size_t j = 1; j < names.size(); ++j)
        for (std::size_t i = 0; i < j; ++i) add_geometric_capacitor(aug, policy, names[j], names[i]);
      for (std::size_t l = 0; l < aug.loops.size(); ++l)
        aug.loop_inductances.push_back({l, policy.inductance_for(l)});
      break;
    }
  }
  return aug;
}

QuadraticLagrangian extended_node_lagrangian(const Augmentation& aug) {
  const Circuit& circuit = aug.circuit;
  QuadraticLagrangian lag{Representation::ExtendedNodeFlux, node_labels(circuit), {}, {}, {}};
  const auto nodes = static_cast<Eigen::Index>(lag.labels.size());
  for (const auto& li : aug.loop_inductances) lag.labels.push_back("Phi_" + std::to_string(li.loop + 1));
  const auto dim = static_cast<Eigen::Index>(lag.labels.size());

  const auto& comps = circuit.components();
  std::vector<Eigen::VectorXd> rows;
  for (const auto& c : comps) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
    row.head(nodes) = node_difference(circuit, c, nodes);
    rows.push_back(row);
  }

  // The loop flux enters the chord (phi_a - phi_b - Phi) and any geometric
  // capacitor spanning the chord's terminals, so the flux law around the loop
  // reads -Phi.
  for (std::size_t k = 0; k < aug.loop_inductances.size(); ++k) {
    const Eigen::Index col = nodes + static_cast<Eigen::Index>(k);
    const auto& chord = comps[aug.loops[aug.loop_inductances[k].loop].chord];
    rows[aug.loops[aug.loop_inductances[k].loop].chord](col) -= 1.0;
    for (std::size_t i = aug.design_components; i < comps.size(); ++i) {
      if (comps[i].node_a == chord.node_a && comps[i].node_b == chord.node_b) rows[i](col) -= 1.0;
      if (comps[i].node_a == chord.node_b && comps[i].node_b == chord.node_a) rows[i](col) += 1.0;
    }
  }

  for (std::size_t i = 0; i < comps.size(); ++i)
    lag.branches.push_back(
        {comps[i].id, comps[i].kind, comps[i].value, rows[i], comps[i].is_capacitor(), comps[i].geometric});
  for (std::size_t k = 0; k < aug.loop_inductances.size(); ++k) {
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim);
    row(nodes + static_cast<Eigen::Index>(k)) = 1.0;
    lag.branches.push_back({"Lg_" + std::to_string(aug.loop_inductances[k].loop + 1),
                            ComponentKind::Inductor, aug.loop_inductances[k].value, row, false, true});
  }
  assemble(lag);
  return lag;
}

QuadraticLagrangian build_lagrangian(const Augmentation& aug, Representation rep) {
  switch (rep) {
    case Representation::NodeFlux:
      return node_lagrangian(aug.circuit);
    case Representation::LoopCharge:
      return loop_lagrangian(aug.design, aug.loops, aug.loop_inductances);
    case Representation::ExtendedNodeFlux:
      return extended_node_lagrangian(aug);
  }
  throw std::invalid_argument("unknown representation");
}

namespace {

void check_trajectory(const QuadraticLagrangian& lag, const Trajectory& traj) {
  if (traj.coords.cols() != static_cast<Eigen::Index>(lag.dimension()))
    throw std::invalid_argument("trajectory does not match the Lagrangian's coordinates");
}

const Branch& branch_for(const QuadraticLagrangian& lag, const std::string& id) {
  const Branch* b = lag.find_branch(id);
  if (!b) throw std::invalid_argument("Lagrangian has no branch '" + id + "'");
  return *b;
}

}  // namespace

Eigen::MatrixXd flux_law_residual(const Circuit& circuit, const std::vector<FundamentalLoop>& loops,
                                  const QuadraticLagrangian& lag, const Trajectory& traj) {
  if (lag.representation == Representation::LoopCharge)
    throw std::invalid_argument("flux law needs a flux-type representation");
  check_trajectory(lag, traj);
  // Oriented loop sum as one row over the coordinates.
  Eigen::MatrixXd loop_rows = Eigen::MatrixXd::Zero(loops.size(), lag.dimension());
  for (std::size_t l = 0; l < loops.size(); ++l)
    for (const auto& br : loops[l].path)
      loop_rows.row(l) += br.sign * branch_for(lag, circuit.components()[br.component].id).row.transpose();
  return traj.coords * loop_rows.transpose();
}

Eigen::MatrixXd charge_law_residual(const Circuit& circuit, const QuadraticLagrangian& lag,
                                    const Trajectory& traj) {
  if (lag.representation != Representation::LoopCharge)
    throw std::invalid_argument("charge law needs the loop-charge representation");
  check_trajectory(lag, traj);
  const std::size_t n = circuit.node_count();
  Eigen::MatrixXd node_rows = Eigen::MatrixXd::Zero(n - 1, lag.dimension());
  for (const auto& c : circuit.components()) {
    const auto& row = branch_for(lag, c.id).row;
    const std::size_t a = circuit.node_index(c.node_a);
    const std::size_t b = circuit.node_index(c.node_b);
    if (a) node_rows.row(a - 1) += row.transpose();
    if (b) node_rows.row(b - 1) -= row.transpose();
  }
  return traj.coords * node_rows.transpose();
}

}  // namespace fluxq
