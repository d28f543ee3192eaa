#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "fluxq/netlist.hpp"
#include "fluxq/topology.hpp"

namespace fluxq {

enum class Representation { NodeFlux, LoopCharge, ExtendedNodeFlux };

const char* to_string(Representation rep);

/// One energy term of a quadratic Lagrangian.
///
/// `row` expresses the branch flux (flux-type representations) or branch
/// charge (LoopCharge) as a linear combination of the coordinates. A kinetic
/// branch contributes weight * (row . xdot)^2 / 2, a potential branch
/// weight * (row . x)^2 / 2.
struct Branch {
  std::string id;
  ComponentKind kind;
  double value;  ///< F or H
  Eigen::VectorXd row;
  bool kinetic;
  bool geometric;

  double weight() const;
};

/// L = xdot^T M xdot / 2 - x^T K x / 2 over `labels`.
struct QuadraticLagrangian {
  Representation representation;
  std::vector<std::string> labels;
  Eigen::MatrixXd mass;
  Eigen::MatrixXd stiffness;
  std::vector<Branch> branches;

  std::size_t dimension() const { return labels.size(); }
  const Branch* find_branch(const std::string& id) const;
};

/// Assembles M and K from the branch list.
void assemble(QuadraticLagrangian& lagrangian);

QuadraticLagrangian node_lagrangian(const Circuit& circuit);

/// Geometric self-inductance attached to one fundamental loop.
struct LoopInductance {
  std::size_t loop;  ///< index into the fundamental loop list
  double value;      ///< H
};

QuadraticLagrangian loop_lagrangian(const Circuit& circuit,
                                    const std::vector<FundamentalLoop>& loops,
                                    const std::vector<LoopInductance>& self_inductances = {});

struct GeometricPolicy {
  enum class Mode { Off, Minimal, AllPairs };
  Mode mode = Mode::Minimal;
  double default_cg = 8.9e-20;
  double default_lg = 1e-15;
  /// Keyed by unordered node pair (smaller name first).
  std::map<std::pair<std::string, std::string>, double> capacitance_overrides;
  std::map<std::size_t, double> loop_overrides;

  double capacitance_for(const std::string& a, const std::string& b) const;
  double inductance_for(std::size_t loop) const;
};

const char* to_string(GeometricPolicy::Mode mode);

/// Design circuit plus geometric components.
///
/// `circuit` holds the design components first (indices unchanged) followed by
/// geometric capacitors. `tree` and `loops` belong to the design circuit; the
/// loop inductances index into `loops`.
struct Augmentation {
  Circuit design;
  Circuit circuit;
  std::size_t design_components = 0;
  SpanningTree tree;
  std::vector<FundamentalLoop> loops;
  std::vector<std::string> added_capacitors;
  std::vector<LoopInductance> loop_inductances;
};

Augmentation augment_geometric(const Circuit& circuit, const GeometricPolicy& policy);

/// Node fluxes plus one loop flux per geometric loop inductance.
QuadraticLagrangian extended_node_lagrangian(const Augmentation& augmentation);

/// Convenience: the Lagrangian `rep` of the augmented circuit.
QuadraticLagrangian build_lagrangian(const Augmentation& augmentation, Representation rep);

struct Trajectory;

/// Per loop, sum of oriented branch fluxes over time (samples x loops).
Eigen::MatrixXd flux_law_residual(const Circuit& circuit,
                                  const std::vector<FundamentalLoop>& loops,
                                  const QuadraticLagrangian& lagrangian,
                                  const Trajectory& trajectory);

/// Per non-ground node, net branch charge leaving the node (samples x nodes-1).
Eigen::MatrixXd charge_law_residual(const Circuit& circuit,
                                    const QuadraticLagrangian& lagrangian,
                                    const Trajectory& trajectory);

}  // namespace fluxq
