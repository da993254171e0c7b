"""Frequency-domain scattering solver and a time-domain relaxation oracle.

For a drive of detuning ``dw`` from the particle resonance, the
steady-state node amplitudes solve ``M a = drive`` where ``M`` is the
dynamical matrix assembled below.  Outgoing port amplitudes follow the
input-output convention ``out = sqrt(g) * a - in``; bath outputs are
``sqrt(bath_rate) * a``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import FluxViolation, NumericallySingular, OracleDiverged
from .model import CoupledModeNetwork, qd_self_energy, resolve_branch

#: Largest tolerated flux excess before the solver is declared buggy.
FLUX_TOL = 1e-9


@dataclass(frozen=True)
class ScatteringSet:
    """Transition amplitudes from each driven port to every output channel.

    ``port_amps[k, p]`` is the amplitude from source ``sources[k]`` into
    port ``ports[p]``; ``bath_amps[k, i]`` the amplitude into the bath of
    node ``i+1``.  Tagged with the branch label and drive detuning.
    """

    branch: str
    dw: float
    ports: tuple[str, ...]
    sources: tuple[str, ...]
    port_amps: np.ndarray
    bath_amps: np.ndarray

    def amp(self, source: str, output: str) -> complex:
        """Amplitude from ``source`` into ``output`` (a port name or ``"b<k>"``)."""
        k = self.sources.index(source)
        if output.startswith("b") and output[1:].isdigit():
            return complex(self.bath_amps[k, int(output[1:]) - 1])
        return complex(self.port_amps[k, self.ports.index(output)])

    def flux_total(self, source: str) -> float:
        """Total outgoing flux for a unit input at ``source``."""
        k = self.sources.index(source)
        return float(
            np.sum(np.abs(self.port_amps[k]) ** 2) + np.sum(np.abs(self.bath_amps[k]) ** 2)
        )


def assemble_dynamical_matrix(
    net: CoupledModeNetwork, branch: str, dw: float
) -> np.ndarray:
    """Complex symmetric matrix of the steady-state amplitude equations.

    Diagonal: ``-1j*dw + bath_rate/2`` plus ``rate/2`` per attached port
    plus the eliminated dipole self-energy for this branch.  Off-diagonal:
    ``1j*g`` per edge.
    """
    m = np.zeros((net.node_count, net.node_count), dtype=complex)
    np.fill_diagonal(m, -1j * dw + net.bath_rate / 2.0)
    for port in net.ports:
        m[port.node - 1, port.node - 1] += port.rate / 2.0
    for attachment in resolve_branch(net, branch):
        m[attachment.node - 1, attachment.node - 1] += qd_self_energy(attachment.qd, dw)
    for i, j, g in net.edges:
        m[i - 1, j - 1] += 1j * g
        m[j - 1, i - 1] += 1j * g
    return m


def _drive_matrix(net: CoupledModeNetwork) -> np.ndarray:
    """Unit-input drive columns, one per source port."""
    drive = np.zeros((net.node_count, len(net.sources)), dtype=complex)
    for k, name in enumerate(net.sources):
        port = net.port(name)
        drive[port.node - 1, k] = math.sqrt(port.rate)
    return drive


def _solve_linear(m: np.ndarray, drive: np.ndarray) -> np.ndarray:
    try:
        amps = np.linalg.solve(m, drive)
    except np.linalg.LinAlgError as exc:
        raise NumericallySingular(f"dynamical matrix is singular: {exc}") from exc
    residual = np.abs(m @ amps - drive).max()
    scale = max(1.0, np.abs(drive).max())
    if residual > 1e-8 * scale:
        cond = float(np.linalg.cond(m))
        raise NumericallySingular(
            f"unreliable solve: residual {residual:.2e}, condition estimate {cond:.2e}"
        )
    return amps


def node_amplitudes(net: CoupledModeNetwork, branch: str, dw: float) -> np.ndarray:
    """Steady-state node amplitudes, shape (node_count, n_sources)."""
    return _solve_linear(assemble_dynamical_matrix(net, branch, dw), _drive_matrix(net))


def solve_scattering(net: CoupledModeNetwork, branch: str, dw: float) -> ScatteringSet:
    """Solve the network and extract all transition amplitudes."""
    amps = node_amplitudes(net, branch, dw)
    n_src = len(net.sources)
    port_amps = np.empty((n_src, len(net.ports)), dtype=complex)
    for p, port in enumerate(net.ports):
        port_amps[:, p] = math.sqrt(port.rate) * amps[port.node - 1, :]
    for k, name in enumerate(net.sources):
        port_amps[k, net.port_names.index(name)] -= 1.0
    bath_amps = math.sqrt(net.bath_rate) * amps.T.copy()
    result = ScatteringSet(
        branch=branch,
        dw=dw,
        ports=net.port_names,
        sources=net.sources,
        port_amps=port_amps,
        bath_amps=bath_amps,
    )
    flux_balance_residual(result)  # raises FluxViolation on solver bugs
    return result


def flux_balance_residual(s: ScatteringSet) -> float:
    """Missing flux ``1 - sum |t|^2``, maximised over sources.

    Positive residual is flux absorbed by dipole decay, the only channel
    not represented by an output mode.  A residual below ``-FLUX_TOL``
    means the solver produced more output than input.
    """
    residuals = [1.0 - s.flux_total(src) for src in s.sources]
    worst = min(residuals)
    if worst < -FLUX_TOL:
        raise FluxViolation(
            f"flux excess {-worst:.3e} for branch {s.branch!r} at dw={s.dw}"
        )
    return max(residuals)


def _full_system(
    net: CoupledModeNetwork, branch: str, dw: float
) -> tuple[np.ndarray, np.ndarray]:
    """Dynamical matrix and drive with dipoles kept as explicit variables.

    Unlike :func:`assemble_dynamical_matrix` there is no adiabatic
    elimination: each coupled dipole adds one row/column with diagonal
    ``gamma/2 + 1j*(delta - dw)`` and coupling ``1j*J`` to its host node.
    """
    coupled = [a for a in resolve_branch(net, branch) if a.qd.coupled and a.qd.J > 0]
    n = net.node_count
    dim = n + len(coupled)
    full = np.zeros((dim, dim), dtype=complex)
    np.fill_diagonal(full[:n, :n], -1j * dw + net.bath_rate / 2.0)
    for port in net.ports:
        full[port.node - 1, port.node - 1] += port.rate / 2.0
    for i, j, g in net.edges:
        full[i - 1, j - 1] += 1j * g
        full[j - 1, i - 1] += 1j * g
    for k, attachment in enumerate(coupled):
        row = n + k
        full[row, row] = attachment.qd.gamma / 2.0 + 1j * (attachment.qd.delta - dw)
        full[row, attachment.node - 1] = 1j * attachment.qd.J
        full[attachment.node - 1, row] = 1j * attachment.qd.J
    drive = np.zeros((dim, len(net.sources)), dtype=complex)
    drive[:n] = _drive_matrix(net)
    return full, drive


def steady_state_oracle(
    net: CoupledModeNetwork,
    branch: str,
    dw: float,
    *,
    rel_tol: float = 1e-12,
    max_steps: int = 5_000_000,
) -> np.ndarray:
    """Relax the co-rotating classical equations of motion to steady state.

    Independent check of the frequency-domain solve: fixed-step RK4
    integration of ``dy/dt = -A y + d`` with the dipoles kept dynamical,
    run until both the step-to-step change and the steady-state residual
    drop below ``rel_tol`` (well under the 1e-8 agreement target).
    Requires a dissipative system; raises :class:`OracleDiverged` when the
    step budget is exhausted.  Returns node amplitudes with the same shape
    as :func:`node_amplitudes`.
    """
    a, d = _full_system(net, branch, dw)
    if np.diagonal(a).real.max(initial=0.0) <= 0.0:
        raise OracleDiverged("undamped system has no steady state to relax to")
    dt = 0.5 / np.abs(a).sum(axis=1).max()
    ad = -a * dt
    dd = d * dt
    drive_scale = max(np.abs(d).max(), 1e-300)

    y = np.zeros_like(d)
    chunk = min(20_000, max(50, int(round(20.0 / dt))))
    steps = 0
    while steps < max_steps:
        y_prev = y.copy()
        for _ in range(chunk):
            k1 = ad @ y + dd
            k2 = ad @ (y + 0.5 * k1) + dd
            k3 = ad @ (y + 0.5 * k2) + dd
            k4 = ad @ (y + k3) + dd
            y = y + (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        steps += chunk
        scale = max(np.abs(y).max(), 1e-300)
        change = np.abs(y - y_prev).max() / scale
        residual = np.abs(-a @ y + d).max() / drive_scale
        if change < rel_tol and residual < rel_tol:
            return y[: net.node_count]
    raise OracleDiverged(
        f"no steady state within {max_steps} steps (residual {residual:.2e}); "
        "the system may be undamped"
    )
