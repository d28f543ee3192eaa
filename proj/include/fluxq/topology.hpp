#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fluxq/netlist.hpp"

namespace fluxq {

class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Component indices into Circuit::components().
struct SpanningTree {
  std::vector<std::size_t> tree;
  std::vector<std::size_t> chords;
};

struct LoopBranch {
  std::size_t component;
  int sign;  // +1 when traversed node_a -> node_b

  friend bool operator==(const LoopBranch&, const LoopBranch&) = default;
};

/// Chord first (sign +1), then the tree path from the chord's node_b back to node_a.
struct FundamentalLoop {
  std::size_t chord;
  std::vector<LoopBranch> path;
};

/// Grows the tree from ground, taking any capacitor that crosses the cut
/// before any inductor; ties go to declaration order. Throws TopologyError
/// when some node is unreachable.
SpanningTree build_spanning_tree(const Circuit& circuit);

/// One loop per chord, in chord order.
std::vector<FundamentalLoop> fundamental_loops(const Circuit& circuit, const SpanningTree& tree);

/// Non-ground nodes with no incident capacitor.
std::vector<std::string> passive_nodes(const Circuit& circuit);

/// Groups of non-ground node indices that have no capacitive path to ground.
/// Empty iff the node-representation kinetic matrix is nonsingular.
std::vector<std::vector<std::size_t>> capacitively_floating_groups(const Circuit& circuit);

/// Loop-by-inductor incidence with orientation signs (loops x inductors).
Eigen::MatrixXd loop_inductor_incidence(const Circuit& circuit,
                                        const std::vector<FundamentalLoop>& loops);

struct LoopDeficiency {
  std::size_t deficiency = 0;          ///< structural: l - rank(B_L), exact arithmetic
  std::size_t numeric_deficiency = 0;  ///< l - numerical rank of B diag(L) B^T
  std::vector<Eigen::VectorXd> witnesses;  ///< basis of loop combinations carrying no inductor
};

LoopDeficiency passive_loop_deficiency(const Circuit& circuit,
                                       const std::vector<FundamentalLoop>& loops);

struct MergeMember {
  std::string id;
  int sign;  // orientation relative to the merged component

  friend bool operator==(const MergeMember&, const MergeMember&) = default;
};

struct Merge {
  enum class Kind { Parallel, Series };
  Kind kind;
  std::string result_id;
  std::vector<MergeMember> members;
};

struct Reduction {
  Circuit circuit;
  std::vector<Merge> merges;  ///< in application order

  bool changed() const { return !merges.empty(); }
};

/// Fixpoint of parallel merging of same-kind branches and series elimination
/// of degree-2 passive nodes. Merged ids are joined with '|' (parallel) or
/// '+' (series).
Reduction reduce_circuit(const Circuit& circuit);

struct TopologyReport {
  std::size_t n = 0;
  std::size_t c = 0;
  std::size_t l = 0;
  std::vector<std::string> passive_nodes;
  LoopDeficiency loop_deficiency;
  bool reducible = false;
  SpanningTree tree;
  std::vector<FundamentalLoop> loops;
};

TopologyReport analyze_topology(const Circuit& circuit);

// Exact rank / null space for small integer-valued matrices.
std::size_t exact_rank(const Eigen::MatrixXd& integer_matrix);
std::vector<Eigen::VectorXd> exact_null_space(const Eigen::MatrixXd& integer_matrix);

}  // namespace fluxq
