"""Quantization of lumped LC circuits: topology, Lagrangians, normal modes, simulation."""

from ._fluxq import (
    HBAR,
    Circuit,
    Component,
    InconsistentInitialConditions,
    ParseError,
    System,
    TopologyError,
    Unquantizable,
    analyze,
    load_netlist,
    parse_netlist,
    quantize,
    reduce,
    run_cli,
)

__all__ = [
    "HBAR",
    "Circuit",
    "Component",
    "InconsistentInitialConditions",
    "ParseError",
    "System",
    "TopologyError",
    "Unquantizable",
    "analyze",
    "load_netlist",
    "parse_netlist",
    "quantize",
    "reduce",
    "run_cli",
]
