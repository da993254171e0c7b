"""Exception types raised by the simulator."""


class SimulationError(Exception):
    """Base class for every error raised by this package."""


class InvalidGeometry(SimulationError):
    """Network or arm geometry violates a structural constraint."""


class SingularSelfEnergy(SimulationError):
    """Dipole response pole hit exactly (zero linewidth, resonant drive)."""


class NumericallySingular(SimulationError):
    """Dynamical matrix could not be inverted reliably."""


class FluxViolation(SimulationError):
    """Scattered flux exceeds input flux beyond tolerance; signals a solver bug."""


class OracleDiverged(SimulationError):
    """Time-domain relaxation failed to reach a steady state."""


class SingularResponse(SimulationError):
    """Closed-form response denominator vanished."""


class InfinitePurcell(SimulationError):
    """Purcell factor is unbounded because the dipole decay rate is zero."""


class MatchingUndefined(SimulationError):
    """No second-source amplitude can cancel the drain-1 output of the decoupled branch."""


class InvalidEfficiency(SimulationError):
    """Detection efficiency outside [0, 1]."""


class NoDetectionProbability(SimulationError):
    """Postselection has zero success probability."""


class InvalidState(SimulationError):
    """Density matrix fails Hermiticity, trace, or positivity checks."""


class InvalidPulse(SimulationError):
    """Pulse parameters outside the model's domain."""


class InvalidMaterial(SimulationError):
    """Material parameters outside the model's domain."""
