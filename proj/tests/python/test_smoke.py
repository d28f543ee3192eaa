import json
import math
from pathlib import Path

import numpy as np
import pytest

import fluxq

FIXTURES = Path(__file__).resolve().parents[2] / "fixtures"


def load(name):
    return fluxq.load_netlist(str(FIXTURES / f"{name}.net"))


def test_parse_and_round_trip():
    c = fluxq.parse_netlist("C1 1 GND 2pF\nL1 1 0 4nH\n")
    assert c.nodes == ["0", "1"]
    assert [x.id for x in c.components] == ["C1", "L1"]
    assert c.components[0].value == pytest.approx(2e-12)
    assert fluxq.parse_netlist(c.to_netlist()) == c
    assert c.validate() == []


def test_parse_error():
    with pytest.raises(fluxq.ParseError):
        fluxq.parse_netlist("C1 2 0 2xF\n")


def test_single_oscillator():
    s = fluxq.quantize(load("fig2b"))
    expected = 1 / (2 * math.pi * math.sqrt(6e-12 * 4e-9)) / 1e9
    assert s.frequencies_ghz[0] == pytest.approx(expected, rel=1e-12)
    assert np.allclose(s.uncertainty_products(), fluxq.HBAR / 2, rtol=1e-12)


def test_topology_and_reduction():
    report = fluxq.analyze(load("fig2a"))
    assert report["passive_nodes"] == ["3"]
    assert report["loop_deficiency"] == 1
    reduced, merges = fluxq.reduce(load("fig2a"))
    assert len(reduced) == 2
    assert [m["kind"] for m in merges["merges"]] == ["parallel", "series"]


def test_unquantizable_without_augmentation():
    with pytest.raises(fluxq.Unquantizable):
        fluxq.quantize(load("fig2a"), geometric="off")


def test_augmented_modes_and_duality():
    node = fluxq.quantize(load("fig2a"), rep="node")
    loop = fluxq.quantize(load("fig2a"), rep="loop", lg=1e-14)
    assert node.added_capacitors == ["Cg_3_2"]
    assert node.frequencies_ghz[0] == pytest.approx(loop.frequencies_ghz[0], rel=1e-6)
    assert node.frequencies_ghz[1] > 1e4
    assert loop.frequencies_ghz[1] == pytest.approx(1378.3, rel=1e-3)
    assert np.allclose(node.mass, node.mass.T)


def test_simulate_sum_rule():
    s = fluxq.quantize(load("fig2a"))
    out = s.simulate(tmax=1e-9, samples=100)
    assert out["t"].shape == (100,)
    total = out["voltage"]["L3"] + out["voltage"]["L4"]
    assert np.max(np.abs(total - out["voltage"]["C1"])) < 1e-9 * 2e-3
    assert np.ptp(out["energy"]) <= 1e-10 * out["energy"][0]


def test_inconsistent_ics():
    with pytest.raises(fluxq.InconsistentInitialConditions):
        fluxq.quantize(load("fig2a")).simulate(ics={"C1": 1e-3, "C2": 2e-3})


def test_cli_in_process():
    code, out, _ = fluxq.run_cli(["modes", str(FIXTURES / "fig2b.net")])
    assert code == 0
    assert json.loads(out)["frequencies_ghz"][0] == pytest.approx(1.0273, rel=1e-4)
    assert fluxq.run_cli(["modes", str(FIXTURES / "fig2a.net"), "--geometric", "off"])[0] == 3
