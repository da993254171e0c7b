"""Single-arm analysis: dipole-induced reflection, Purcell limits, spectra.

A single chain of nanoparticles with a source nanowire on particle 1, a
drain nanowire on particle ``n``, and one quantum dot on particle 1.  For
``n = 1`` source and drain share the node and the response has a closed
form, which doubles as an oracle for the general solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InfinitePurcell, InvalidGeometry, SingularResponse
from .model import CoupledModeNetwork, DipoleAttachment, PortAttachment, QDConfig
from .scattering import solve_scattering

#: Default detuning grid: resolves the dipole-dressed linewidth at the
#: parameter scales of interest.
DEFAULT_DW_GRID = np.linspace(-3.0, 3.0, 601)


@dataclass(frozen=True)
class ArmConfig:
    """Single chain of ``n`` particles with one dipole on particle 1."""

    n: int
    g_inout: float
    gamma0: float
    qd: QDConfig

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidGeometry(f"need at least one nanoparticle, got n={self.n}")
        if self.g_inout < 0 or self.gamma0 < 0:
            raise ValueError("coupling and damping rates must be nonnegative")


@dataclass(frozen=True)
class ArmSpectrumPoint:
    """Energy balance of the arm at one drive detuning."""

    dw: float
    transmission: float
    reflection: float
    absorption: float
    dipole_loss: float


def arm_network(cfg: ArmConfig, g_np: float = 1.0) -> CoupledModeNetwork:
    """Coupled-mode graph of the arm; reuses the generic network solver."""
    edges = tuple((i, i + 1, g_np) for i in range(1, cfg.n))
    ports = (
        PortAttachment("s", 1, cfg.g_inout),
        PortAttachment("d", cfg.n, cfg.g_inout),
    )
    return CoupledModeNetwork(
        node_count=cfg.n,
        edges=edges,
        ports=ports,
        sources=("s",),
        bath_rate=cfg.gamma0,
        dipoles=(DipoleAttachment(1, cfg.qd),),
    )


def single_site_closed_form(
    g_inout: float, gamma0: float, qd: QDConfig, dw: float
) -> tuple[complex, complex, complex]:
    """Exact (transmission, reflection, bath) amplitudes for one particle.

    The particle carries the source, the drain, its loss bath, and the
    dipole; ``qd.coupled=False`` or ``qd.J=0`` reduces to the bare lossy
    particle.
    """
    j2 = qd.J**2 if qd.coupled else 0.0
    dip = qd.gamma / 2.0 + 1j * (qd.delta - dw)
    den = j2 + dip * (g_inout + gamma0 / 2.0 - 1j * dw)
    if den == 0:
        raise SingularResponse("zero response denominator")
    t = g_inout * dip / den
    r = -(j2 + dip * (gamma0 / 2.0 - 1j * dw)) / den
    b = math.sqrt(g_inout) * math.sqrt(gamma0) * dip / den
    return t, r, b


def purcell_factor(J: float, gamma: float, g_inout: float, gamma0: float) -> float:
    """Emission enhancement ``(2 J^2 / gamma) / (g_inout + gamma0 / 2)``.

    Dipole-induced reflection needs this to be much greater than one.
    """
    if gamma < 0 or J < 0 or g_inout < 0 or gamma0 < 0:
        raise ValueError("rates must be nonnegative")
    if gamma == 0:
        raise InfinitePurcell("unbounded Purcell factor: dipole decay rate is zero")
    return (2.0 * J**2 / gamma) / (g_inout + gamma0 / 2.0)


def resonant_amplitudes_via_purcell(
    J: float, gamma: float, g_inout: float, gamma0: float
) -> tuple[float, float, float]:
    """Resonant (t, r, b) in terms of the Purcell factor and bare-particle amplitudes.

    With ``t0 = g/(g + gamma0/2)``, ``r0 = -(gamma0/2)/(g + gamma0/2)`` and
    ``a0 = sqrt(g*gamma0)/(g + gamma0/2)`` the resonant response of the
    dressed particle is ``t0/(Fp+1)``, ``-(Fp - r0)/(Fp+1)``, ``a0/(Fp+1)``.
    Equals :func:`single_site_closed_form` at ``delta = dw = 0``.
    """
    fp = purcell_factor(J, gamma, g_inout, gamma0)
    half_width = g_inout + gamma0 / 2.0
    t0 = g_inout / half_width
    r0 = -(gamma0 / 2.0) / half_width
    a0 = math.sqrt(g_inout * gamma0) / half_width
    return t0 / (fp + 1.0), -(fp - r0) / (fp + 1.0), a0 / (fp + 1.0)


def arm_spectrum(arm: ArmConfig, dw_grid=DEFAULT_DW_GRID) -> list[ArmSpectrumPoint]:
    """Transmission, reflection, and absorption of the arm over a detuning grid."""
    net = arm_network(arm)
    points = []
    for dw in np.asarray(dw_grid, dtype=float):
        s = solve_scattering(net, "g", float(dw))
        transmission = abs(s.amp("s", "d")) ** 2
        reflection = abs(s.amp("s", "s")) ** 2
        absorption = float(np.sum(np.abs(s.bath_amps[0]) ** 2))
        points.append(
            ArmSpectrumPoint(
                dw=float(dw),
                transmission=transmission,
                reflection=reflection,
                absorption=absorption,
                dipole_loss=1.0 - transmission - reflection - absorption,
            )
        )
    return points
