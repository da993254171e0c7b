"""Coupled-mode model of a two-arm metal-nanoparticle array.

The network consists of two linear chains of ``n`` nanoparticles joined
by a four-particle beam splitter, two source nanowires, two drain
nanowires, an independent loss bath on every particle, and an optional
three-level quantum dot on each outermost particle.

All rates are dimensionless, expressed in units of the interparticle
coupling of the arms.  Node indices are 1-based: the left arm occupies
nodes ``1..n``, the drain nodes are ``n+1`` (drain 1) and ``n+2``
(drain 2), and the right arm occupies nodes ``n+3..2n+2``.  Sources
attach to nodes ``1`` and ``2n+2``, which also host the quantum dots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InvalidGeometry, SingularSelfEnergy

#: Joint qubit configurations of (QD1, QD2), in fixed matrix-basis order.
BRANCHES: tuple[str, ...] = ("gg", "gm", "mg", "mm")


@dataclass(frozen=True)
class QDConfig:
    """Quantum dot coupled to one nanoparticle.

    ``J`` is the vacuum Rabi coupling to the adjacent particle, ``gamma``
    the spontaneous decay rate of the optical transition, and ``delta``
    the detuning of that transition from the particle resonance.  A dot
    in its metastable state is spectrally decoupled, which is modelled by
    ``coupled=False`` (equivalent to ``J = 0``).
    """

    J: float
    gamma: float
    delta: float = 0.0
    coupled: bool = True

    def __post_init__(self) -> None:
        if self.J < 0 or self.gamma < 0:
            raise ValueError("dipole rates J and gamma must be nonnegative")


@dataclass(frozen=True)
class NetworkConfig:
    """Physical rates of the two-arm geometry, in units of the arm coupling."""

    n: int
    g_inout: float
    gamma0: float
    qd1: QDConfig
    qd2: QDConfig
    g_np: float = 1.0
    omega0_over_gnp: float | None = None

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidGeometry(f"need at least 2 nanoparticles per arm, got n={self.n}")
        if self.g_inout <= 0:
            raise InvalidGeometry("nanowire coupling g_inout must be positive")
        if self.gamma0 < 0 or self.g_np <= 0:
            raise InvalidGeometry("rates gamma0 >= 0 and g_np > 0 required")


@dataclass(frozen=True)
class PortAttachment:
    """Nanowire port: name, 1-based node index, and coupling rate."""

    name: str
    node: int
    rate: float


@dataclass(frozen=True)
class DipoleAttachment:
    """Quantum dot attached to one node."""

    node: int
    qd: QDConfig


@dataclass(frozen=True)
class CoupledModeNetwork:
    """Damped bosonic network with nanowire ports and dipole attachments.

    ``edges`` holds undirected couplings ``(i, j, g)`` with 1-based node
    indices; every node carries an independent bath of rate
    ``bath_rate``.  ``sources`` names the driven subset of ``ports``.
    """

    node_count: int
    edges: tuple[tuple[int, int, float], ...]
    ports: tuple[PortAttachment, ...]
    sources: tuple[str, ...]
    bath_rate: float
    dipoles: tuple[DipoleAttachment, ...]

    def port(self, name: str) -> PortAttachment:
        for p in self.ports:
            if p.name == name:
                return p
        raise KeyError(f"no port named {name!r}")

    @property
    def port_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.ports)


def beam_splitter_couplings(g_inout: float, gamma0: float) -> tuple[float, float]:
    """Couplings (horizontal, vertical) that make the four-particle centre a 50/50 splitter.

    The horizontal couplings bridge the two arms and the drains; the
    vertical ones close the plaquette.  Balanced lossy splitting needs
    ``g_h = (g_inout + gamma0) / 2`` and ``g_v = sqrt(2) * g_h``.
    """
    if g_inout < 0 or gamma0 < 0:
        raise ValueError("coupling rates must be nonnegative")
    g_h = (g_inout + gamma0) / 2.0
    return g_h, math.sqrt(2.0) * g_h


def build_network(config: NetworkConfig) -> CoupledModeNetwork:
    """Assemble the two-arm network graph for a given configuration."""
    n = config.n
    if n < 2:
        raise InvalidGeometry(f"need at least 2 nanoparticles per arm, got n={n}")
    node_count = 2 * n + 2
    g_h, g_v = beam_splitter_couplings(config.g_inout, config.gamma0)

    edges: list[tuple[int, int, float]] = []
    for i in range(1, n):  # left arm chain 1..n
        edges.append((i, i + 1, config.g_np))
    for i in range(n + 3, node_count):  # right arm chain n+3..2n+2
        edges.append((i, i + 1, config.g_np))
    # The bridging (horizontal) bonds carry the opposite sign to the arm
    # couplings: near-field coupling flips sign with the orientation of the
    # charge oscillation against the bond axis.  This choice makes the
    # centre a symmetric 50/50 splitter with t[s->far drain] = i * t[s->near
    # drain] at zero detuning; flipping both signs is a gauge change that
    # would conjugate that phase.
    edges += [
        (n, n + 3, -g_h),
        (n + 1, n + 2, -g_h),
        (n, n + 1, g_v),
        (n + 2, n + 3, g_v),
    ]

    ports = (
        PortAttachment("s1", 1, config.g_inout),
        PortAttachment("s2", node_count, config.g_inout),
        PortAttachment("d1", n + 1, config.g_inout),
        PortAttachment("d2", n + 2, config.g_inout),
    )
    dipoles = (
        DipoleAttachment(1, config.qd1),
        DipoleAttachment(node_count, config.qd2),
    )
    return CoupledModeNetwork(
        node_count=node_count,
        edges=tuple(edges),
        ports=ports,
        sources=("s1", "s2"),
        bath_rate=config.gamma0,
        dipoles=dipoles,
    )


def resolve_branch(
    net: CoupledModeNetwork, branch: str
) -> tuple[DipoleAttachment, ...]:
    """Apply a branch label to the network's dipoles.

    The k-th character of ``branch`` selects the state of the k-th dipole:
    ``g`` keeps it coupled, ``m`` decouples it.
    """
    if len(branch) != len(net.dipoles) or any(c not in "gm" for c in branch):
        raise ValueError(
            f"branch {branch!r} does not label {len(net.dipoles)} dipole(s) with 'g'/'m'"
        )
    resolved = []
    for attachment, state in zip(net.dipoles, branch):
        coupled = attachment.qd.coupled and state == "g"
        resolved.append(replace(attachment, qd=replace(attachment.qd, coupled=coupled)))
    return tuple(resolved)


def qd_self_energy(qd: QDConfig, dw: float) -> complex:
    """Dipole contribution to its host node's diagonal response at detuning ``dw``.

    In the weak-excitation limit the dipole amplitude follows the node
    field and can be eliminated, adding ``J**2 / (gamma/2 + 1j*(delta - dw))``
    to the node's damping.  Decoupled dipoles contribute nothing.  The
    real part is nonnegative for ``gamma > 0`` (the eliminated dipole is
    passive).
    """
    if not qd.coupled or qd.J == 0.0:
        return 0j
    den = qd.gamma / 2.0 + 1j * (qd.delta - dw)
    if den == 0:
        raise SingularSelfEnergy(
            f"dipole response pole: gamma=0 and delta == dw == {dw}"
        )
    return qd.J**2 / den
