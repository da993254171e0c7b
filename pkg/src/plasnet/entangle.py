"""Heralded entanglement protocol: matching, postselection, figures of merit.

Coherent states of amplitude ``alpha`` and ``beta`` drive the two sources.
Per joint dot configuration (branch) the outputs stay coherent, with
amplitudes fixed by the branch's scattering set.  ``beta`` is chosen so
the fully decoupled branch never fires the drain-1 detector; conditioning
on a detection there then leaves the dots in a mixed two-qubit state
whose overlap with the singlet measures the protocol quality.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import (
    InvalidEfficiency,
    InvalidState,
    MatchingUndefined,
    NoDetectionProbability,
)
from .model import BRANCHES, NetworkConfig, build_network
from .scattering import ScatteringSet, solve_scattering

_NORM_TOL = 1e-12


@dataclass(frozen=True)
class InitAmplitudes:
    """Initial superposition amplitudes of the two dots, one normalised pair each."""

    c_g1: complex
    c_m1: complex
    c_g2: complex
    c_m2: complex

    def __post_init__(self) -> None:
        for g, m, label in ((self.c_g1, self.c_m1, "1"), (self.c_g2, self.c_m2, "2")):
            norm = abs(g) ** 2 + abs(m) ** 2
            if abs(norm - 1.0) > _NORM_TOL:
                raise ValueError(f"dot {label} amplitudes not normalised: |c|^2 = {norm}")

    @classmethod
    def equal_superposition(cls) -> "InitAmplitudes":
        c = 1.0 / np.sqrt(2.0)
        return cls(c, c, c, c)

    def weight(self, branch: str) -> complex:
        """Product of initialisation amplitudes selecting this branch."""
        c1 = self.c_g1 if branch[0] == "g" else self.c_m1
        c2 = self.c_g2 if branch[1] == "g" else self.c_m2
        return c1 * c2


@dataclass(frozen=True)
class CoherentOutputs:
    """Output coherent amplitudes of one branch: sources, drains, baths."""

    branch: str
    xi1: complex
    xi2: complex
    mu1: complex
    mu2: complex
    chi: np.ndarray


@dataclass(frozen=True)
class ProtocolResult:
    """Matched drive, postselected state, and figures of merit of one run."""

    beta: complex
    rho: np.ndarray
    fidelity: float
    efficiency: float
    concurrence_lb: float


def matching_beta(alpha: complex, s_mm: ScatteringSet) -> complex:
    """Source-2 amplitude cancelling the drain-1 output of the decoupled branch.

    ``beta = -alpha * t[s1->d1] / t[s2->d1]`` evaluated on the branch with
    both dots decoupled, so that branch's drain-1 amplitude is exactly zero.
    """
    t2 = s_mm.amp("s2", "d1")
    if t2 == 0:
        raise MatchingUndefined("t[s2->d1] vanishes on the decoupled branch")
    beta = -alpha * s_mm.amp("s1", "d1") / t2
    if not cmath.isfinite(beta):
        raise MatchingUndefined("matching amplitude overflowed")
    return beta


def branch_outputs(s: ScatteringSet, alpha: complex, beta: complex) -> CoherentOutputs:
    """Superpose the two source drives into this branch's output amplitudes."""
    combine = lambda out: alpha * s.amp("s1", out) + beta * s.amp("s2", out)
    chi = alpha * s.bath_amps[0] + beta * s.bath_amps[1]
    return CoherentOutputs(
        branch=s.branch,
        xi1=combine("s1"),
        xi2=combine("s2"),
        mu1=combine("d1"),
        mu2=combine("d2"),
        chi=chi,
    )


def _overlap_exponent(nu, mu) -> complex:
    """log <nu|mu| for coherent amplitudes; summed over array inputs."""
    nu = np.asarray(nu, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    return complex(np.sum(np.conj(nu) * mu - (np.abs(mu) ** 2 + np.abs(nu) ** 2) / 2.0))


def coherent_overlap(nu: complex, mu: complex) -> complex:
    """Inner product <nu|mu> of two coherent states."""
    return cmath.exp(_overlap_exponent(nu, mu))


def detector_overlap(nu: complex, mu: complex, kappa: float) -> complex:
    """Matrix element <nu|D|mu> of a non-number-resolving click with efficiency ``kappa``.

    The click operator is ``I - sum_n (1-kappa)^n |n><n|``; detecting a
    coherent state against itself gives ``1 - exp(-kappa |mu|^2)``, and
    ``kappa = 1`` reduces to projecting out the vacuum.
    """
    if not 0.0 <= kappa <= 1.0:
        raise InvalidEfficiency(f"detection efficiency {kappa} outside [0, 1]")
    base = -(abs(mu) ** 2 + abs(nu) ** 2) / 2.0
    cross = np.conj(complex(nu)) * complex(mu)
    return cmath.exp(base + cross) - cmath.exp(base + (1.0 - kappa) * cross)


def postselected_state(
    outputs: dict[str, CoherentOutputs],
    init: InitAmplitudes,
    kappa: float = 1.0,
) -> tuple[np.ndarray, float]:
    """Two-qubit state of the dots conditioned on a drain-1 click, and its probability.

    Entry (p, q) in the ``gg, gm, mg, mm`` basis is the product of the
    initialisation weights, the overlaps of all unobserved output modes
    (sources, drain 2, baths), and the detector matrix element on drain 1.
    Raises :class:`NoDetectionProbability` when the click never happens.
    """
    rho = np.empty((4, 4), dtype=complex)
    for i, p in enumerate(BRANCHES):
        for j, q in enumerate(BRANCHES):
            op, oq = outputs[p], outputs[q]
            passive = (
                _overlap_exponent(oq.xi1, op.xi1)
                + _overlap_exponent(oq.xi2, op.xi2)
                + _overlap_exponent(oq.mu2, op.mu2)
                + _overlap_exponent(oq.chi, op.chi)
            )
            rho[i, j] = (
                init.weight(p)
                * np.conj(init.weight(q))
                * cmath.exp(passive)
                * detector_overlap(oq.mu1, op.mu1, kappa)
            )
    eta = float(np.trace(rho).real)
    if eta <= 0.0:
        raise NoDetectionProbability(
            "drain-1 detection probability is zero; nothing to postselect on"
        )
    return rho / eta, eta


def fidelity(rho: np.ndarray) -> float:
    """Overlap of ``rho`` with the two-qubit singlet (|mg> - |gm>)/sqrt(2)."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4) or np.abs(rho - rho.conj().T).max() > 1e-10:
        raise InvalidState("expected a Hermitian 4x4 density matrix")
    f = 0.5 * (rho[1, 1] + rho[2, 2] - rho[1, 2] - rho[2, 1]).real
    if f < -1e-9 or f > 1.0 + 1e-9:
        raise InvalidState(f"fidelity {f} outside [0, 1]")
    return min(1.0, max(0.0, f))


def concurrence_lower_bound(f: float) -> float:
    """Entanglement witness: ``C >= max(0, 2F - 1)``."""
    return max(0.0, 2.0 * f - 1.0)


def run_protocol(
    config: NetworkConfig,
    alpha: complex,
    init: InitAmplitudes | None = None,
    kappa: float = 1.0,
    dw: float = 0.0,
    insertion: float = 1.0,
) -> ProtocolResult:
    """Full protocol run: solve all branches, match, postselect, score.

    ``insertion`` is an amplitude transmission factor applied to the input
    drives before the network (input-side loss only rescales the usable
    drive, so it enters nowhere else).
    """
    if init is None:
        init = InitAmplitudes.equal_superposition()
    net = build_network(config)
    sets = {b: solve_scattering(net, b, dw) for b in BRANCHES}
    alpha_eff = insertion * alpha
    beta = matching_beta(alpha_eff, sets["mm"])
    outputs = {b: branch_outputs(sets[b], alpha_eff, beta) for b in BRANCHES}
    rho, eta = postselected_state(outputs, init, kappa)
    f = fidelity(rho)
    return ProtocolResult(
        beta=beta,
        rho=rho,
        fidelity=f,
        efficiency=eta,
        concurrence_lb=concurrence_lower_bound(f),
    )
