import cmath
import math

import numpy as np
import pytest

from plasnet import (
    BRANCHES,
    InitAmplitudes,
    QDConfig,
    branch_outputs,
    build_network,
    coherent_overlap,
    concurrence_lower_bound,
    detector_overlap,
    fidelity,
    matching_beta,
    postselected_state,
    run_protocol,
    solve_scattering,
)
from plasnet.errors import (
    InvalidEfficiency,
    InvalidState,
    MatchingUndefined,
    NoDetectionProbability,
)
from plasnet.scattering import ScatteringSet

SINGLET = np.zeros((4, 4), dtype=complex)
SINGLET[1, 1] = SINGLET[2, 2] = 0.5
SINGLET[1, 2] = SINGLET[2, 1] = -0.5


def _protocol_pieces(config, alpha=0.5, dw=0.0):
    net = build_network(config)
    sets = {b: solve_scattering(net, b, dw) for b in BRANCHES}
    beta = matching_beta(alpha, sets["mm"])
    outputs = {b: branch_outputs(sets[b], alpha, beta) for b in BRANCHES}
    return sets, beta, outputs


# ------------------------------------------------------------------ matching

def test_matching_beta_symmetric_config(make_config):
    _, beta, outputs = _protocol_pieces(make_config(), alpha=0.5)
    assert beta == pytest.approx(0.5j, abs=1e-10)
    assert abs(outputs["mm"].mu1) < 1e-13


def test_matching_beta_zero_alpha(make_config):
    sets, beta, _ = _protocol_pieces(make_config(), alpha=0.0)
    assert beta == 0


def test_matching_beta_asymmetric_detunings(make_config):
    cfg = make_config(d1=0.15, d2=-0.05)
    _, _, outputs = _protocol_pieces(cfg, alpha=0.5)
    assert abs(outputs["mm"].mu1) < 1e-14


def test_matching_undefined():
    dead = ScatteringSet(
        branch="mm",
        dw=0.0,
        ports=("s1", "s2", "d1", "d2"),
        sources=("s1", "s2"),
        port_amps=np.array([[0, 0, 0.5, 0], [0, 0, 0, 0.5]], dtype=complex),
        bath_amps=np.zeros((2, 1), dtype=complex),
    )
    with pytest.raises(MatchingUndefined):
        matching_beta(1.0, dead)


# ------------------------------------------------------------------ outputs

def test_matched_outputs_antisymmetric_on_resonance(make_config):
    _, _, outputs = _protocol_pieces(make_config(), alpha=0.5)
    assert outputs["gm"].mu1 == pytest.approx(-outputs["mg"].mu1, abs=1e-12)
    assert outputs["gm"].mu2 == pytest.approx(outputs["mg"].mu2, abs=1e-12)


def test_branch_outputs_are_linear_combinations(make_config):
    sets, beta, outputs = _protocol_pieces(make_config(), alpha=0.5)
    s = sets["gm"]
    expected = 0.5 * s.amp("s1", "d2") + beta * s.amp("s2", "d2")
    assert outputs["gm"].mu2 == pytest.approx(expected, abs=0)
    assert outputs["gm"].chi.shape == (6,)


# ------------------------------------------------------------------ overlaps

def test_coherent_overlap_against_vacuum():
    mu = 0.4 + 0.3j
    assert coherent_overlap(0, mu) == pytest.approx(math.exp(-abs(mu) ** 2 / 2), abs=1e-15)


def test_coherent_overlap_identity():
    assert coherent_overlap(0.7 - 0.2j, 0.7 - 0.2j) == pytest.approx(1.0, abs=1e-15)


def test_coherent_overlap_unit_pair():
    assert coherent_overlap(1.0, 1j) == pytest.approx(cmath.exp(1j - 1), abs=1e-15)


def test_detector_overlap_diagonal_click_probability():
    for mu, kappa in ((0.3, 1.0), (1.7, 0.4), (0.01, 0.9)):
        assert detector_overlap(mu, mu, kappa) == pytest.approx(
            1.0 - math.exp(-kappa * mu**2), abs=1e-15
        )


def test_detector_overlap_blind_detector():
    assert detector_overlap(0.3 + 1j, 0.8, 0.0) == 0


def test_detector_overlap_perfect_detector():
    nu, mu = 0.4 - 0.1j, 0.2 + 0.6j
    expected = coherent_overlap(nu, mu) - cmath.exp(-(abs(mu) ** 2 + abs(nu) ** 2) / 2)
    assert detector_overlap(nu, mu, 1.0) == pytest.approx(expected, abs=1e-15)


def test_detector_overlap_rejects_bad_efficiency():
    for kappa in (-0.1, 1.1):
        with pytest.raises(InvalidEfficiency):
            detector_overlap(0.1, 0.1, kappa)


# ------------------------------------------------------------------ postselection

def test_balanced_populations_on_resonance(make_config):
    _, _, outputs = _protocol_pieces(make_config(), alpha=0.5)
    rho, _ = postselected_state(outputs, InitAmplitudes.equal_superposition(), 1.0)
    assert rho[1, 1].real == pytest.approx(0.5, abs=1e-10)
    assert rho[2, 2].real == pytest.approx(0.5, abs=1e-10)


def test_state_is_physical_across_draws(make_config, rng):
    for _ in range(15):
        cfg = make_config(
            n=int(rng.integers(2, 5)),
            g_inout=rng.uniform(0.1, 2.5),
            gamma0=rng.uniform(0.01, 1.0),
            d1=rng.uniform(-0.3, 0.3),
            d2=rng.uniform(-0.3, 0.3),
        )
        alpha = rng.uniform(0.05, 2.0)
        kappa = rng.uniform(0.1, 1.0)
        _, _, outputs = _protocol_pieces(cfg, alpha=alpha)
        rho, eta = postselected_state(outputs, InitAmplitudes.equal_superposition(), kappa)
        assert np.abs(rho - rho.conj().T).max() < 1e-10
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-10)
        assert np.linalg.eigvalsh(rho).min() > -1e-9
        assert 0.0 < eta <= 1.0


def test_literal_entry_reduction(make_config):
    """At full efficiency and equal superposition the entries reduce to the
    closed-form vacuum-projection expressions, built here independently."""
    _, _, outputs = _protocol_pieces(make_config(), alpha=0.5)
    rho, eta = postselected_state(outputs, InitAmplitudes.equal_superposition(), 1.0)

    inner = lambda a, b: cmath.exp(np.conj(a) * b - (abs(a) ** 2 + abs(b) ** 2) / 2)
    innerv = lambda a, b: cmath.exp(
        complex(np.sum(np.conj(a) * b - (np.abs(a) ** 2 + np.abs(b) ** 2) / 2))
    )
    gm, mg = outputs["gm"], outputs["mg"]
    eta_lit = 1.0 - 0.25 * sum(abs(inner(0, outputs[b].mu1)) ** 2 for b in BRANCHES)
    rho22_lit = (1.0 - inner(gm.mu1, 0) * inner(0, gm.mu1)) / (4 * eta_lit)
    rho33_lit = (1.0 - inner(mg.mu1, 0) * inner(0, mg.mu1)) / (4 * eta_lit)
    cross = (
        (inner(gm.mu1, mg.mu1) - inner(gm.mu1, 0) * inner(0, mg.mu1))
        * inner(gm.mu2, mg.mu2)
        * inner(gm.xi1, mg.xi1)
        * inner(gm.xi2, mg.xi2)
        * innerv(gm.chi, mg.chi)
        / (4 * eta_lit)
    )
    assert eta == pytest.approx(eta_lit, abs=1e-12)
    assert rho[1, 1] == pytest.approx(rho22_lit, abs=1e-12)
    assert rho[2, 2] == pytest.approx(rho33_lit, abs=1e-12)
    # rows are kets: the bra-gm expression lands in the (mg, gm) slot
    assert rho[2, 1] == pytest.approx(cross, abs=1e-12)
    assert rho[1, 2] == pytest.approx(np.conj(cross), abs=1e-12)


def test_no_detection_probability_without_drive(make_config):
    _, _, outputs = _protocol_pieces(make_config(), alpha=0.0)
    with pytest.raises(NoDetectionProbability):
        postselected_state(outputs, InitAmplitudes.equal_superposition(), 1.0)


def test_matching_ratio_initialisation_still_ideal(make_config):
    """Unequal superpositions work when both dots share the g/m amplitude ratio."""
    init = InitAmplitudes(0.6, 0.8, 0.6, 0.8)
    res = run_protocol(make_config(), alpha=0.02, init=init)
    assert res.fidelity > 0.999


def test_unequal_superposition_costs_efficiency_not_fidelity(make_config):
    equal = run_protocol(make_config(), alpha=0.3)
    skewed = run_protocol(make_config(), alpha=0.3, init=InitAmplitudes(0.6, 0.8, 0.6, 0.8))
    assert skewed.fidelity == pytest.approx(equal.fidelity, abs=5e-3)
    assert skewed.efficiency < equal.efficiency


# ------------------------------------------------------------------ figures of merit

def test_fidelity_of_singlet():
    assert fidelity(SINGLET) == pytest.approx(1.0, abs=1e-15)


def test_fidelity_of_maximally_mixed():
    assert fidelity(np.eye(4, dtype=complex) / 4) == pytest.approx(0.25, abs=1e-15)


def test_fidelity_of_dephased_mixture():
    rho = np.zeros((4, 4), dtype=complex)
    rho[1, 1] = rho[2, 2] = 0.5
    assert fidelity(rho) == pytest.approx(0.5, abs=1e-15)


def test_fidelity_rejects_non_hermitian():
    rho = np.eye(4, dtype=complex) / 4
    rho[0, 1] = 0.2
    with pytest.raises(InvalidState):
        fidelity(rho)


def test_concurrence_lower_bound_values():
    assert concurrence_lower_bound(1.0) == 1.0
    assert concurrence_lower_bound(0.5) == 0.0
    assert concurrence_lower_bound(0.8) == pytest.approx(0.6, abs=1e-15)


# ------------------------------------------------------------------ full protocol

def test_weak_drive_reaches_near_unit_fidelity(make_config):
    for n in (2, 3):
        res = run_protocol(make_config(n=n), alpha=0.01)
        assert res.fidelity >= 0.99


def test_strong_drive_saturates_at_one_half(make_config):
    for n in (2, 3):
        res = run_protocol(make_config(n=n), alpha=10.0)
        assert res.fidelity == pytest.approx(0.5, abs=0.02)
        assert res.efficiency == pytest.approx(0.5, abs=0.02)


def test_global_phase_invariance(make_config):
    base = run_protocol(make_config(), alpha=0.5)
    rotated = run_protocol(make_config(), alpha=0.5 * cmath.exp(0.7j))
    assert rotated.fidelity == pytest.approx(base.fidelity, abs=1e-12)
    assert rotated.efficiency == pytest.approx(base.efficiency, abs=1e-12)


def test_efficiency_monotone_in_detector_efficiency(make_config):
    cfg = make_config()
    etas = [run_protocol(cfg, alpha=0.5, kappa=float(k)).efficiency
            for k in np.linspace(0.05, 1.0, 21)]
    assert all(b >= a for a, b in zip(etas, etas[1:]))


def test_fidelity_robust_to_metal_loss(make_config):
    results = [run_protocol(make_config(gamma0=float(g)), alpha=0.5)
               for g in np.linspace(0.01, 1.0, 11)]
    fs = [r.fidelity for r in results]
    etas = [r.efficiency for r in results]
    assert max(fs) - min(fs) <= 0.1
    assert max(etas) / min(etas) >= 2.0


def test_detuning_symmetries(make_config):
    def fid(d0, dd, n=2):
        return run_protocol(make_config(n=n, d1=d0 + dd, d2=d0 - dd), alpha=0.5).fidelity

    for n in (2, 3):
        assert fid(0.1, 0.04, n) == pytest.approx(fid(0.1, -0.04, n), abs=1e-9)
        assert fid(-0.1, 0.04, n) == pytest.approx(fid(0.1, 0.04, n), abs=1e-9)


def test_insertion_loss_rescales_drive(make_config):
    lossy = run_protocol(make_config(), alpha=1.0, insertion=0.5)
    direct = run_protocol(make_config(), alpha=0.5)
    assert lossy.fidelity == pytest.approx(direct.fidelity, abs=0)
    assert lossy.efficiency == pytest.approx(direct.efficiency, abs=0)
    assert lossy.beta == pytest.approx(direct.beta, abs=0)


def test_init_amplitudes_must_be_normalised():
    with pytest.raises(ValueError):
        InitAmplitudes(1.0, 0.5, 1.0, 0.0)
