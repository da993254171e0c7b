"""Approximation guards.

These checks never alter solver results; they only annotate whether a
parameter point sits inside the regime where the coupled-mode treatment
is trustworthy (weak coupling, weak excitation, narrowband pulses).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidMaterial, InvalidPulse
from .model import NetworkConfig, beam_splitter_couplings

#: Fraction of the particle resonance that any coupling may not exceed.
WEAK_COUPLING_FRACTION = 0.1

#: Default margin below which the weak-excitation ratio triggers a warning.
WEAK_EXCITATION_THRESHOLD = 10.0


@dataclass(frozen=True)
class CheckItem:
    """Single guard: value against bound, with a pass/fail/unchecked status.

    ``sense`` records whether the bound is an upper or a lower limit, so
    the margin is always headroom (positive while passing).
    """

    name: str
    status: str
    value: float | None = None
    bound: float | None = None
    sense: str = "upper"

    @property
    def margin(self) -> float | None:
        if self.value is None or self.bound is None:
            return None
        if self.sense == "lower":
            return self.value - self.bound
        return self.bound - self.value


def weak_coupling_check(config: NetworkConfig) -> list[CheckItem]:
    """Flag any coupling rate exceeding a tenth of the particle resonance.

    Needs ``config.omega0_over_gnp``; without it every item is reported
    as ``unchecked`` rather than silently passed.
    """
    g_h, g_v = beam_splitter_couplings(config.g_inout, config.gamma0)
    rates = [
        ("g_np", config.g_np),
        ("g_inout", config.g_inout),
        ("g_h", g_h),
        ("g_v", g_v),
    ]
    if config.omega0_over_gnp is None:
        return [CheckItem(name, "unchecked", value) for name, value in rates]
    bound = WEAK_COUPLING_FRACTION * config.omega0_over_gnp * config.g_np
    return [
        CheckItem(name, "pass" if value <= bound else "fail", value, bound)
        for name, value in rates
    ]


def weak_excitation_margin(
    J: float,
    g_inout: float,
    gamma0: float,
    delta: float,
    n_bar: float,
    dtau: float,
) -> float:
    """Ratio by which the dot stays unsaturated; much greater than 1 required.

    The saturation bound compares ``J^2/g + delta^2 (g + gamma0)^2 / (4 J^2 g)``
    against the photon flux ``n_bar / dtau``.  ``n_bar = 0`` gives an
    unbounded (infinite) margin.
    """
    if J <= 0 or g_inout <= 0 or dtau <= 0:
        raise InvalidPulse("need J > 0, g_inout > 0 and a positive pulse duration")
    if n_bar < 0:
        raise InvalidPulse("mean photon number must be nonnegative")
    lhs = J**2 / g_inout + delta**2 * (g_inout + gamma0) ** 2 / (4.0 * J**2 * g_inout)
    if n_bar == 0:
        return math.inf
    return lhs / (n_bar / dtau)


@dataclass(frozen=True)
class PulseConfig:
    """Gaussian drive pulse: mean photon number, spectral width, duration."""

    mean_photons: float
    sigma: float
    duration: float | None = None

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise InvalidPulse("spectral width sigma must be positive")
        if self.mean_photons < 0:
            raise InvalidPulse("mean photon number must be nonnegative")

    @classmethod
    def from_bandwidth(
        cls, mean_photons: float, fwhm_bandwidth: float, duration: float | None = None
    ) -> "PulseConfig":
        if fwhm_bandwidth <= 0:
            raise InvalidPulse("bandwidth must be positive")
        return cls(mean_photons, fwhm_bandwidth / (2.0 * math.sqrt(2.0 * math.log(2.0))), duration)

    @property
    def fwhm_bandwidth(self) -> float:
        """Full width at half maximum of the spectral intensity profile."""
        return self.sigma * 2.0 * math.sqrt(2.0 * math.log(2.0))


def gaussian_spectrum(pulse: PulseConfig, omega_grid) -> np.ndarray:
    """Spectral amplitude profile over ``omega_grid`` (offsets from the carrier).

    The unit-photon profile is ``(2 pi sigma^2)^(-1/4) exp(-w^2 / (4 sigma^2))``,
    scaled by ``sqrt(mean_photons)`` so the integrated intensity equals the
    photon number.
    """
    w = np.asarray(omega_grid, dtype=float)
    profile = (2.0 * math.pi * pulse.sigma**2) ** -0.25 * np.exp(
        -(w**2) / (4.0 * pulse.sigma**2)
    )
    return math.sqrt(pulse.mean_photons) * profile


def matthiessen_damping(v_fermi: float, lambda_bulk: float, radius: float) -> float:
    """Size-dependent damping rate ``v_F / lambda_B + v_F / R`` (physical units)."""
    if v_fermi <= 0 or lambda_bulk <= 0 or radius <= 0:
        raise InvalidMaterial("Fermi velocity, mean free path, and radius must be positive")
    return v_fermi / lambda_bulk + v_fermi / radius
