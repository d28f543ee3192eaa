#include "fluxq/serialize.hpp"

#include <numbers>

namespace fluxq {

using nlohmann::json;

double to_ghz(double omega) { return omega / (2.0 * std::numbers::pi) / 1e9; }

namespace {

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

json topology_json(const Circuit& circuit, const TopologyReport& r) {
  const auto& comps = circuit.components();
  json tree = json::array(), chords = json::array(), loops = json::array();
  for (auto i : r.tree.tree) tree.push_back(comps[i].id);
  for (auto i : r.tree.chords) chords.push_back(comps[i].id);
  for (const auto& loop : r.loops) {
    json path = json::array();
    for (const auto& br : loop.path) path.push_back({{"id", comps[br.component].id}, {"sign", br.sign}});
    loops.push_back(std::move(path));
  }
  json witnesses = json::array();
  for (const auto& w : r.loop_deficiency.witnesses) witnesses.push_back(vector_json(w));
  return {
      {"n", r.n},
      {"c", r.c},
      {"l", r.l},
      {"passive_nodes", r.passive_nodes},
      {"loop_deficiency", r.loop_deficiency.deficiency},
      {"loop_deficiency_witnesses", witnesses},
      {"reducible", r.reducible},
      {"tree", tree},
      {"chords", chords},
      {"loops", loops},
  };
}

json lagrangian_json(const QuadraticLagrangian& lag) {
  json assignment = json::object();
  for (const auto& b : lag.branches) assignment[b.id] = vector_json(b.row);
  return {
      {"representation", to_string(lag.representation)},
      {"labels", lag.labels},
      {"M", matrix_json(lag.mass)},
      {"K", matrix_json(lag.stiffness)},
      {"flux_assignment", assignment},
  };
}

json modes_json(const HamiltonianSystem& h, const ModeDecomposition& md) {
  json freqs = json::array();
  for (Eigen::Index k = 0; k < md.omegas.size(); ++k) freqs.push_back(to_ghz(md.omegas(k)));

  json attribution = json::object();
  for (const auto& a : mode_attribution(md, h)) attribution[a.coordinate] = to_ghz(a.omega);

  const auto state = ground_state(md, h);
  const auto spread = coordinate_spreads(state);
  const Eigen::VectorXd products = spread.delta_x.cwiseProduct(spread.delta_p) / (h.hbar / 2.0);
  return {
      {"representation", to_string(h.representation)},
      {"labels", h.labels},
      {"frequencies_ghz", freqs},
      {"attribution", attribution},
      {"zero_modes", md.zero_modes},
      {"ground_state",
       {{"delta_x", vector_json(spread.delta_x)},
        {"delta_p", vector_json(spread.delta_p)},
        {"products_over_hbar2", vector_json(products)},
        {"mode_products_over_hbar2", vector_json(mode_uncertainty_products(state, md, h) / (h.hbar / 2.0))}}},
  };
}

json reduction_json(const Reduction& red) {
  json merges = json::array();
  for (const auto& m : red.merges) {
    json members = json::array();
    for (const auto& mem : m.members) members.push_back({{"id", mem.id}, {"sign", mem.sign}});
    merges.push_back({{"kind", m.kind == Merge::Kind::Parallel ? "parallel" : "series"},
                      {"result", m.result_id},
                      {"members", members}});
  }
  return {{"netlist", serialize_netlist(red.circuit)}, {"merges", merges}};
}

}  // namespace fluxq
