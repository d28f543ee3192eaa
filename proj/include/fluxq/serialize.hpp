#pragma once

#include <json.hpp>

#include "fluxq/lagrangian.hpp"
#include "fluxq/netlist.hpp"
#include "fluxq/quantize.hpp"
#include "fluxq/topology.hpp"

namespace fluxq {

/// {n, c, l, passive_nodes, loop_deficiency, reducible, tree, chords, loops}
nlohmann::json topology_json(const Circuit& circuit, const TopologyReport& report);

/// {representation, labels, M, K, flux_assignment}; matrices as row-major nested arrays.
nlohmann::json lagrangian_json(const QuadraticLagrangian& lagrangian);

/// {representation, frequencies_ghz, attribution, zero_modes, ground_state}
nlohmann::json modes_json(const HamiltonianSystem& h, const ModeDecomposition& modes);

nlohmann::json reduction_json(const Reduction& reduction);

double to_ghz(double omega);

}  // namespace fluxq
