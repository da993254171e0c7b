import math
from dataclasses import replace

import numpy as np
import pytest

from plasnet import (
    BRANCHES,
    QDConfig,
    beam_splitter_couplings,
    build_network,
    qd_self_energy,
)
from plasnet.errors import InvalidGeometry, SingularSelfEnergy
from plasnet.model import resolve_branch


def _edge_map(net):
    """Undirected edge lookup {frozenset(i, j): coupling}."""
    return {frozenset((i, j)): g for i, j, g in net.edges}


def test_minimal_network_layout(make_config):
    net = build_network(make_config(n=2))
    assert net.node_count == 6
    edges = _edge_map(net)
    g_h, g_v = beam_splitter_couplings(0.5, 0.1)
    assert edges[frozenset((1, 2))] == 1.0  # left arm
    assert edges[frozenset((5, 6))] == 1.0  # right arm
    assert edges[frozenset((2, 5))] == -g_h
    assert edges[frozenset((3, 4))] == -g_h
    assert edges[frozenset((2, 3))] == g_v
    assert edges[frozenset((4, 5))] == g_v
    assert len(edges) == 6
    assert {p.name: p.node for p in net.ports} == {"s1": 1, "s2": 6, "d1": 3, "d2": 4}
    assert [d.node for d in net.dipoles] == [1, 6]


def test_drain_nodes_n3(make_config):
    net = build_network(make_config(n=3))
    assert net.node_count == 8
    assert net.port("d1").node == 4
    assert net.port("d2").node == 5


def test_long_array_node_count(make_config):
    # n = 40 gives 82 particles; at a 150 nm pitch that is a ~6 um device.
    assert build_network(make_config(n=40)).node_count == 82


@pytest.mark.parametrize("n", range(2, 8))
def test_edge_count(make_config, n):
    net = build_network(make_config(n=n))
    assert len(net.edges) == 2 * (n - 1) + 4


def test_build_network_deterministic(make_config):
    assert build_network(make_config()) == build_network(make_config())


def test_rejects_single_particle_arms(make_config):
    with pytest.raises(InvalidGeometry):
        make_config(n=1)


def test_rejects_nonpositive_port_coupling(make_config):
    with pytest.raises(InvalidGeometry):
        make_config(g_inout=0.0)


@pytest.mark.parametrize("n", (2, 3, 5))
def test_mirror_relabelling_maps_network_onto_itself(make_config, n):
    net = build_network(make_config(n=n))
    mirror = lambda i: 2 * n + 3 - i
    edges = _edge_map(net)
    for pair, g in edges.items():
        i, j = tuple(pair)
        assert edges[frozenset((mirror(i), mirror(j)))] == g
    ports = {p.name: p.node for p in net.ports}
    assert mirror(ports["s1"]) == ports["s2"]
    assert mirror(ports["d1"]) == ports["d2"]
    assert {mirror(d.node) for d in net.dipoles} == {d.node for d in net.dipoles}


def test_beam_splitter_coupling_values():
    g_h, g_v = beam_splitter_couplings(0.5, 0.1)
    assert g_h == pytest.approx(0.3, abs=1e-15)
    assert g_v == pytest.approx(0.3 * math.sqrt(2.0), abs=1e-15)
    assert beam_splitter_couplings(0.0, 0.0) == (0.0, 0.0)
    g_h, g_v = beam_splitter_couplings(2.0, 0.1)
    assert g_h == pytest.approx(1.05, abs=1e-15)
    assert g_v == pytest.approx(1.05 * math.sqrt(2.0), abs=1e-15)


def test_beam_splitter_rejects_negative_rates():
    with pytest.raises(ValueError):
        beam_splitter_couplings(-0.1, 0.0)


def test_self_energy_resonant_value(default_qd):
    # J^2 / (gamma/2) = 0.09 / 0.0005
    assert qd_self_energy(default_qd, 0.0) == pytest.approx(180.0, rel=1e-14)


def test_self_energy_decoupled_and_bare():
    decoupled = QDConfig(J=0.3, gamma=0.001, coupled=False)
    assert qd_self_energy(decoupled, 0.0) == 0
    assert qd_self_energy(QDConfig(J=0.0, gamma=0.0, delta=0.2), 1.3) == 0


def test_self_energy_pole_raises():
    with pytest.raises(SingularSelfEnergy):
        qd_self_energy(QDConfig(J=0.3, gamma=0.0, delta=0.4), 0.4)


def test_self_energy_passive(rng):
    for _ in range(200):
        qd = QDConfig(
            J=rng.uniform(0, 1.5),
            gamma=rng.uniform(1e-4, 0.5),
            delta=rng.uniform(-2, 2),
        )
        assert qd_self_energy(qd, rng.uniform(-3, 3)).real >= 0.0


def test_qd_rejects_negative_rates():
    with pytest.raises(ValueError):
        QDConfig(J=-0.1, gamma=0.0)


def test_resolve_branch_states(make_config):
    net = build_network(make_config())
    for branch in BRANCHES:
        resolved = resolve_branch(net, branch)
        assert [a.qd.coupled for a in resolved] == [c == "g" for c in branch]


def test_resolve_branch_respects_decoupled_config(make_config, default_qd):
    cfg = make_config()
    cfg = replace(cfg, qd2=replace(cfg.qd2, coupled=False))
    resolved = resolve_branch(build_network(cfg), "gg")
    assert resolved[0].qd.coupled and not resolved[1].qd.coupled


def test_resolve_branch_rejects_bad_labels(make_config):
    net = build_network(make_config())
    for bad in ("g", "ggg", "gx"):
        with pytest.raises(ValueError):
            resolve_branch(net, bad)
