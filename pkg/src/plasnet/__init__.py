"""Coupled-mode simulator for heralded entanglement on lossy nanoparticle arrays."""

from .arm import (
    ArmConfig,
    ArmSpectrumPoint,
    arm_spectrum,
    purcell_factor,
    resonant_amplitudes_via_purcell,
    single_site_closed_form,
)
from .entangle import (
    CoherentOutputs,
    InitAmplitudes,
    ProtocolResult,
    branch_outputs,
    coherent_overlap,
    concurrence_lower_bound,
    detector_overlap,
    fidelity,
    matching_beta,
    postselected_state,
    run_protocol,
)
from .model import (
    BRANCHES,
    CoupledModeNetwork,
    NetworkConfig,
    QDConfig,
    beam_splitter_couplings,
    build_network,
    qd_self_energy,
)
from .scattering import (
    ScatteringSet,
    assemble_dynamical_matrix,
    flux_balance_residual,
    node_amplitudes,
    solve_scattering,
    steady_state_oracle,
)
from .validity import (
    PulseConfig,
    gaussian_spectrum,
    matthiessen_damping,
    weak_coupling_check,
    weak_excitation_margin,
)

__version__ = "0.1.0"
