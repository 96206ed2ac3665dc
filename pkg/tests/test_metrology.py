import itertools
from dataclasses import replace

import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_density, seeds
from multient.core import DensityOperator, EntanglementError, PureState, ghz_state, haar_random_pure, plus_state, tensor_product
from multient.metrology import (
    GHZ_FAMILY,
    UNCORRELATED_FAMILY,
    ProbeFamily4,
    RamseyConfig,
    dephase,
    ghz_limit,
    jz_diagonal,
    optimal_time,
    optimize_probe,
    probe_state_4,
    qfi_mixed,
    qfi_pure,
    quantum_fisher_information,
    ramsey_probability,
    shot_noise_limit,
    time_sweep,
    uncertainty,
)

CFG4 = RamseyConfig(n=4, t=0.01, T=1.0)


def bures_qfi(rho, t, gamma, domega=1e-3):
    """QFI from the Bures fidelity between neighbouring frequencies."""
    n = int(round(np.log2(rho.shape[0])))
    jz = jz_diagonal(n)
    rho = dephase(rho, gamma, t)
    u = np.exp(-1j * domega * t * jz)
    sigma = u[:, None] * rho * u.conj()[None, :]
    s = scipy.linalg.sqrtm(rho)
    fid = np.trace(scipy.linalg.sqrtm(s @ sigma @ s)).real
    return 8 * (1 - fid) / domega**2


# Ramsey law and limits --------------------------------------------------------


def test_ramsey_probability():
    cfg = RamseyConfig(omega0=3.0, t=0.5, T=1.0)
    assert ramsey_probability(cfg, 3.0) == 1.0
    assert ramsey_probability(cfg, 3.0 + np.pi / 0.5) == pytest.approx(0.0, abs=1e-15)
    assert ramsey_probability(cfg, 3.0 + np.pi / 2 / 0.5) == pytest.approx(0.5, abs=1e-15)


@given(st.floats(-50, 50), st.floats(1e-3, 1))
def test_ramsey_probability_in_unit_interval(omega, t):
    p = ramsey_probability(RamseyConfig(t=t, T=1.0), omega)
    assert 0 <= p <= 1


def test_limits_for_four_ions():
    assert shot_noise_limit(CFG4).delta_omega0 == pytest.approx(5.0, rel=1e-12)
    assert ghz_limit(CFG4).delta_omega0 == pytest.approx(2.5, rel=1e-12)
    assert ghz_limit(CFG4).delta_omega0 / shot_noise_limit(CFG4).delta_omega0 == pytest.approx(0.5)


def test_limits_coincide_for_one_ion():
    cfg = replace(CFG4, n=1)
    assert shot_noise_limit(cfg).delta_omega0 == ghz_limit(cfg).delta_omega0


@pytest.mark.parametrize("kwargs", [dict(n=0), dict(t=0.0), dict(t=2.0, T=1.0), dict(gamma=-1.0)])
def test_config_validation(kwargs):
    with pytest.raises(EntanglementError):
        RamseyConfig(**kwargs)


# Fisher information -----------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 4, 8])
def test_qfi_reproduces_both_limits(n):
    cfg = RamseyConfig(n=n, t=0.01, T=1.0)
    plus = uncertainty(plus_state(n), cfg)
    ghz = uncertainty(ghz_state(n), cfg)
    assert plus.fisher_information == pytest.approx(n * cfg.t**2, rel=1e-10)
    assert ghz.fisher_information == pytest.approx(n**2 * cfg.t**2, rel=1e-10)
    assert plus.delta_omega0 == pytest.approx(shot_noise_limit(cfg).delta_omega0, rel=1e-10)
    assert ghz.delta_omega0 == pytest.approx(ghz_limit(cfg).delta_omega0, rel=1e-10)


@given(seeds, st.integers(1, 4))
def test_mixed_formula_agrees_with_variance_on_pure_states(seed, n):
    psi = haar_random_pure(n, seed)
    assert qfi_mixed(psi.projector(), 0.3) == pytest.approx(qfi_pure(psi, 0.3), rel=1e-8, abs=1e-12)


@given(seeds, st.floats(0.1, 2.0))
def test_qfi_matches_bures_fidelity_oracle(seed, gamma):
    rng = np.random.default_rng(seed)
    rho = random_density(3, rng)
    t = 0.4
    assert quantum_fisher_information(DensityOperator.from_matrix(rho), t, gamma) == pytest.approx(
        bures_qfi(rho, t, gamma), rel=1e-3)


@given(seeds)
def test_qfi_is_additive_over_independent_probes(seed):
    a, b = haar_random_pure(1, seed), haar_random_pure(2, seed + 1)
    joint = quantum_fisher_information(tensor_product(a, b), 0.2)
    assert joint == pytest.approx(quantum_fisher_information(a, 0.2) + quantum_fisher_information(b, 0.2),
                                  rel=1e-8, abs=1e-14)


def test_uncertainty_report_identity():
    cfg = RamseyConfig(n=4, t=0.2, T=1.0, gamma=0.5)
    r = uncertainty(probe_state_4(ProbeFamily4.from_angles(0.3, 0.7)), cfg)
    assert r.delta_omega0 == (r.fisher_information * cfg.T / cfg.t) ** -0.5
    assert r.to_dict()["resources"]["gamma"] == 0.5


# Dephasing --------------------------------------------------------------------


@given(seeds, st.floats(0, 5), st.integers(1, 4))
def test_dephasing_preserves_trace_and_positivity(seed, gt, n):
    rho = random_density(n, np.random.default_rng(seed))
    out = dephase(rho, gt, 1.0)
    assert np.trace(out).real == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(out, out.conj().T)
    assert np.linalg.eigvalsh(out).min() >= -1e-10


def test_dephasing_kills_ghz_coherence_at_rate_n_gamma():
    rho = dephase(ghz_state(3).projector(), 0.7, 2.0)
    assert rho[0, 7].real == pytest.approx(0.5 * np.exp(-3 * 0.7 * 2.0))
    assert rho[0, 0] == pytest.approx(0.5)


# Probe family -----------------------------------------------------------------


def test_family_reductions():
    assert np.allclose(probe_state_4(GHZ_FAMILY).amplitudes, ghz_state(4).amplitudes)
    assert np.allclose(probe_state_4(UNCORRELATED_FAMILY).amplitudes, 0.25)
    assert np.allclose(probe_state_4(UNCORRELATED_FAMILY).amplitudes, plus_state(4).amplitudes)


def test_family_normalization_is_enforced():
    with pytest.raises(EntanglementError):
        ProbeFamily4(0.5, 0.5, 0.5)
    with pytest.raises(EntanglementError):
        ProbeFamily4(-1 / np.sqrt(2), 0, 0)


@given(st.floats(0, np.pi / 2), st.floats(0, np.pi / 2))
def test_family_states_are_permutation_symmetric(a, b):
    fam = ProbeFamily4.from_angles(a, b)
    t = probe_state_4(fam).tensor()
    for perm in itertools.permutations(range(4)):
        assert np.allclose(t.transpose(perm), t)
    assert np.allclose(ProbeFamily4.from_angles(*fam.angles()).lambda2, fam.lambda2)


# Time and probe optimization --------------------------------------------------


def test_optimal_time_without_dephasing_uses_full_duration():
    r = optimal_time(ghz_state(4), CFG4)
    assert r.resources.t == CFG4.T


@pytest.mark.parametrize("gamma, T", [(1.0, 1.0), (0.5, 4.0), (2.0, 1.0)])
def test_ghz_enhancement_disappears_under_dephasing(gamma, T):
    cfg = RamseyConfig(n=4, t=0.01, T=T, gamma=gamma)
    closed_form = np.sqrt(2 * gamma * np.e / (4 * T))
    ghz = optimal_time(ghz_state(4), cfg)
    plus = optimal_time(plus_state(4), cfg)
    assert ghz.delta_omega0 == pytest.approx(closed_form, rel=1e-8)
    assert plus.delta_omega0 == pytest.approx(closed_form, rel=1e-8)
    assert ghz.resources.t == pytest.approx(1 / (8 * gamma), rel=1e-5)
    r = optimize_probe(cfg, frozen=GHZ_FAMILY)
    assert abs(r.improvement) < 0.01


def test_without_dephasing_optimizer_finds_ghz():
    r = optimize_probe(CFG4)
    assert r.family.lambda1 < 1e-4 and r.family.lambda2 < 1e-4
    assert r.improvement == pytest.approx(1.0, abs=1e-6)  # 1/sqrt(N) in uncertainty


def test_family_optimization_beats_independent_grid_search():
    cfg = RamseyConfig(n=4, t=0.01, T=1.0, gamma=1.0)
    r = optimize_probe(cfg)
    # Oracle: exhaustive grid over the family chart and log t.
    times = np.exp(np.linspace(np.log(0.02), np.log(1.0), 60))
    axis = np.linspace(0, np.pi / 2, 25)
    best = np.inf
    for a, b in itertools.product(axis, axis):
        rho = probe_state_4(ProbeFamily4.from_angles(a, b)).projector()
        rate = max(quantum_fisher_information(rho, t, 1.0) / t for t in times)
        best = min(best, (rate * cfg.T) ** -0.5)
    assert r.report.delta_omega0 <= best * (1 + 1e-9)
    assert r.report.delta_omega0 >= best * (1 - 0.01)
    assert r.improvement > 0
    assert r.improvement == pytest.approx(r.baseline.delta_omega0 / r.report.delta_omega0 - 1)


@settings(max_examples=6)
@given(st.floats(0.05, 5.0))
def test_optimized_probe_never_loses_to_baseline(gamma):
    r = optimize_probe(RamseyConfig(n=4, t=0.01, T=1.0, gamma=gamma), grid=5, restarts=1)
    assert r.improvement >= -1e-9


def test_optimizer_is_deterministic_per_seed():
    cfg = RamseyConfig(n=4, t=0.01, T=1.0, gamma=1.0)
    a = optimize_probe(cfg, grid=5, restarts=2, seed=3)
    b = optimize_probe(cfg, grid=5, restarts=2, seed=3)
    assert a.to_dict() == b.to_dict()


def test_optimizer_requires_four_ions():
    with pytest.raises(EntanglementError):
        optimize_probe(RamseyConfig(n=3, gamma=1.0))


def test_time_sweep_rows():
    rows = time_sweep(ghz_state(4), CFG4, [0.01, 0.1, 1.0], "ghz")
    assert [r["t"] for r in rows] == [0.01, 0.1, 1.0]
    assert rows[0]["delta_omega0"] == pytest.approx(2.5)
    assert {r["scheme"] for r in rows} == {"ghz"}


def test_pure_state_input_types_agree():
    psi = probe_state_4(ProbeFamily4.from_angles(0.4, 0.4))
    as_matrix = quantum_fisher_information(psi.projector(), 0.3, 0.8)
    assert quantum_fisher_information(psi, 0.3, 0.8) == pytest.approx(as_matrix, rel=1e-12)
    assert quantum_fisher_information(PureState.from_vector(psi.amplitudes), 0.3) == pytest.approx(
        qfi_pure(psi, 0.3))
