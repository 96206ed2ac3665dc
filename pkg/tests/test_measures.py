import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import (
    binary_entropy,
    purity_global_entanglement,
    random_density,
    seeds,
    spin_flip_concurrence,
    symmetric_overlap_grid,
)
from multient.core import (
    DensityOperator,
    EntanglementError,
    PureState,
    Split,
    bell_state,
    ghz_state,
    haar_random_pure,
    partial_trace,
    product_state,
    projective_measure_qubit,
    schmidt_pair,
    tensor_product,
    w_state,
)
from multient.measures import (
    bloch_basis,
    concurrence_2q,
    concurrence_work,
    entropy_of_entanglement,
    geometric_measure,
    global_entanglement,
    localizable_entanglement,
    max_product_overlap,
    relative_entropy,
    relative_entropy_of_entanglement_ub,
    schmidt_measure,
    tangle,
)

PSI_PLUS = bell_state("psi+")
PRODUCT3 = product_state([[1, 2], [1j, 1], [1, -1]])


def _permute(psi, order):
    return PureState.from_vector(psi.tensor().transpose(order).ravel())


# Entropy of entanglement ------------------------------------------------------


def test_entropy_of_entanglement_examples():
    assert entropy_of_entanglement(PSI_PLUS, [1]) == pytest.approx(1.0)
    assert entropy_of_entanglement(product_state([[1, 0], [1, 1]]), [1]) == pytest.approx(0, abs=1e-12)
    theta = np.arcsin(0.5)  # sin²θ = 1/4
    value = entropy_of_entanglement(schmidt_pair(theta), [1])
    assert value == pytest.approx(binary_entropy(0.25), abs=1e-12)
    assert value == pytest.approx(0.8113, abs=1e-4)


@given(seeds)
def test_entropy_of_entanglement_is_symmetric(seed):
    psi = haar_random_pure(4, seed)
    a = entropy_of_entanglement(psi, Split.parse("13-24"))
    rho = psi.to_density()
    assert a == pytest.approx(entropy_of_entanglement(psi, [2, 4]), abs=1e-12)
    from multient.core import von_neumann_entropy

    assert a == pytest.approx(von_neumann_entropy(partial_trace(rho, [2, 4])), abs=1e-10)


def test_entropy_of_entanglement_needs_a_bipartition():
    with pytest.raises(EntanglementError):
        entropy_of_entanglement(ghz_state(3), Split.parse("1-2-3"))


# Schmidt measure --------------------------------------------------------------


def test_schmidt_measure_examples():
    assert schmidt_measure(ghz_state(3)).value == pytest.approx(1.0)
    assert schmidt_measure(w_state(3)).value == np.log2(3)
    assert schmidt_measure(PRODUCT3).value == 0.0


def test_schmidt_measure_interval_when_rank_is_not_exact():
    r = schmidt_measure(w_state(4), restarts=2)
    assert r.lower == pytest.approx(1.0)
    assert r.lower <= r.upper <= 3


# Global entanglement ----------------------------------------------------------


def test_global_entanglement_of_product_state():
    assert global_entanglement(PRODUCT3) == pytest.approx(0, abs=1e-12)


@pytest.mark.parametrize("n", range(2, 9))
def test_global_entanglement_of_ghz(n):
    psi = ghz_state(n)
    assert purity_global_entanglement(psi.amplitudes, n) == pytest.approx(1.0)
    assert global_entanglement(psi) == pytest.approx(1.0, abs=1e-12)


def test_global_entanglement_of_w():
    # Each single-site reduction of W has purity 5/9.
    assert purity_global_entanglement(w_state(3).amplitudes, 3) == pytest.approx(8 / 9)
    assert global_entanglement(w_state(3)) == pytest.approx(8 / 9, abs=1e-12)


@given(seeds, st.integers(2, 6))
def test_global_entanglement_matches_purity_oracle(seed, n):
    psi = haar_random_pure(n, seed)
    q = global_entanglement(psi)
    assert abs(q - purity_global_entanglement(psi.amplitudes, n)) < 1e-9
    assert -1e-12 <= q <= 1 + 1e-12


# Geometric measure ------------------------------------------------------------


def test_geometric_measure_of_product_state():
    r = geometric_measure(PRODUCT3, restarts=5)
    assert r.value == pytest.approx(0, abs=1e-6)


def test_geometric_measure_of_ghz():
    oracle = symmetric_overlap_grid(ghz_state(3).amplitudes, 3)
    assert oracle == pytest.approx(0.5, abs=1e-9)
    r = geometric_measure(ghz_state(3))
    assert r.details["overlap_sq"] == pytest.approx(0.5, abs=1e-8)
    assert r.value == pytest.approx(1.0, abs=1e-8)


def test_geometric_measure_of_w():
    oracle = symmetric_overlap_grid(w_state(3).amplitudes, 3)
    assert oracle == pytest.approx(4 / 9, abs=1e-6)
    r = geometric_measure(w_state(3))
    assert r.details["overlap_sq"] == pytest.approx(4 / 9, abs=1e-8)
    assert r.value == pytest.approx(np.sqrt(10) / 3, abs=1e-8)
    # Optimal local vectors satisfy cos²α = 2/3.
    for v in r.ansatz["local_vectors"]:
        assert abs(complex(*v[0])) ** 2 == pytest.approx(2 / 3, abs=1e-6)


@given(seeds, st.integers(2, 4))
def test_geometric_overlap_identity(seed, n):
    psi = haar_random_pure(n, seed)
    r = geometric_measure(psi, restarts=5, seed=seed)
    assert r.value**2 + 2 * r.details["overlap_sq"] == pytest.approx(2.0, abs=1e-9)


def test_product_overlap_is_deterministic_per_seed():
    psi = haar_random_pure(4, 3)
    a = max_product_overlap(psi, restarts=4, seed=11)
    b = max_product_overlap(psi, restarts=4, seed=11)
    assert a[0] == b[0]


# Concurrence and tangle -------------------------------------------------------


def test_concurrence_of_bell_state():
    work = concurrence_work(PSI_PLUS.to_density())
    assert np.allclose(work.rho_tilde, PSI_PLUS.projector(), atol=1e-12)
    assert work.lambdas == pytest.approx([1, 0, 0, 0], abs=1e-12)
    assert concurrence_2q(PSI_PLUS.to_density()) == pytest.approx(1.0)


def test_concurrence_of_product_state_is_zero():
    rho = product_state([[1, 1j], [2, 1]]).to_density()
    work = concurrence_work(rho)
    assert np.allclose(rho.matrix @ work.rho_tilde, 0, atol=1e-12)
    assert concurrence_2q(rho) == pytest.approx(0, abs=1e-12)


def test_concurrence_of_reduced_w_state():
    rho = np.zeros((4, 4), dtype=complex)
    rho[0, 0] = 1 / 3
    rho += 2 / 3 * PSI_PLUS.projector()
    assert spin_flip_concurrence(rho) == pytest.approx(2 / 3, abs=1e-12)
    assert concurrence_2q(DensityOperator.from_matrix(rho)) == pytest.approx(2 / 3, abs=1e-8)


@given(seeds, st.sampled_from([1, 2, 4]))
def test_concurrence_matches_spin_flip_oracle(seed, rank):
    rho = random_density(2, np.random.default_rng(seed), rank=rank)
    work = concurrence_work(rho)
    assert np.all(np.diff(work.lambdas) <= 1e-15)
    assert np.all(work.lambdas >= -1e-12)
    assert abs(work.concurrence - spin_flip_concurrence(rho)) < 1e-7


def test_pure_state_concurrence_closed_form():
    psi = schmidt_pair(0.3)
    expected = 2 * np.sin(0.3) * np.cos(0.3)
    assert concurrence_2q(psi) == pytest.approx(expected, abs=1e-10)


def test_tangle_examples():
    assert tangle(ghz_state(3)) == pytest.approx(1.0, abs=1e-12)
    assert tangle(w_state(3)) == pytest.approx(0.0, abs=1e-12)
    assert tangle(PRODUCT3) == pytest.approx(0.0, abs=1e-12)
    assert tangle(tensor_product(PureState.basis([0]), PSI_PLUS)) == pytest.approx(0, abs=1e-12)


def test_w_pair_concurrences_saturate_the_split():
    rho = w_state(3).to_density()
    c12 = concurrence_2q(partial_trace(rho, [1, 2]))
    c13 = concurrence_2q(partial_trace(rho, [1, 3]))
    assert (c12, c13) == pytest.approx((2 / 3, 2 / 3), abs=1e-10)


@given(seeds)
def test_tangle_is_permutation_invariant(seed):
    psi = haar_random_pure(3, seed)
    values = [tangle(_permute(psi, p)) for p in itertools.permutations(range(3))]
    assert max(values) - min(values) < 1e-10
    assert 0 <= values[0] <= 1


def test_tangle_rejects_mixed_input():
    with pytest.raises(TypeError):
        tangle(DensityOperator.maximally_mixed(3))


# Relative entropy -------------------------------------------------------------


def test_relative_entropy_basics(rng):
    rho = DensityOperator.from_matrix(random_density(2, rng))
    assert relative_entropy(rho, rho.matrix) == pytest.approx(0, abs=1e-10)
    pure = PSI_PLUS.to_density()
    assert relative_entropy(pure, np.diag([1.0, 0, 0, 0])) == float("inf")


def test_ree_of_separable_state_is_zero():
    r = relative_entropy_of_entanglement_ub(DensityOperator.maximally_mixed(3), restarts=1)
    assert r.value == pytest.approx(0, abs=1e-6)


def test_ree_of_bell_state():
    r = relative_entropy_of_entanglement_ub(PSI_PLUS.to_density(), restarts=2)
    assert r.value == pytest.approx(1.0, abs=1e-2)
    w = np.array(r.ansatz["weights"])
    assert np.all(w >= 0) and w.sum() == pytest.approx(1.0, abs=1e-10)
    for comp in r.ansatz["components"]:
        for v in comp:
            assert np.linalg.norm(np.array(v)) == pytest.approx(1.0, abs=1e-10)


def test_ree_of_partially_entangled_pair():
    psi = schmidt_pair(np.arcsin(0.5))
    r = relative_entropy_of_entanglement_ub(psi.to_density(), restarts=2)
    assert r.value == pytest.approx(binary_entropy(0.25), abs=1e-2)


@given(seeds)
def test_ree_never_undercuts_entropy_of_entanglement(seed):
    psi = haar_random_pure(2, seed)
    r = relative_entropy_of_entanglement_ub(psi.to_density(), restarts=1, seed=seed)
    assert r.value >= entropy_of_entanglement(psi, [1]) - 1e-3


def test_ree_argument_checks():
    with pytest.raises(EntanglementError):
        relative_entropy_of_entanglement_ub(PSI_PLUS.to_density(), K=3)
    with pytest.raises(EntanglementError):
        relative_entropy_of_entanglement_ub(DensityOperator.maximally_mixed(4))


# Localizable entanglement -----------------------------------------------------


def _measured_average(psi, basis):
    return sum(r.probability * concurrence_2q(r.post_state)
               for r in projective_measure_qubit(psi, 1, basis) if not r.zero_probability)


def test_localizable_entanglement_of_ghz():
    assert _measured_average(ghz_state(3), bloch_basis(np.pi / 2, 0)) == pytest.approx(1.0)
    assert localizable_entanglement(ghz_state(3), (2, 3)) == pytest.approx(1.0, abs=1e-6)


def test_localizable_entanglement_of_product_state():
    assert localizable_entanglement(PRODUCT3, (1, 3)) == pytest.approx(0, abs=1e-10)


def test_localizable_entanglement_of_w():
    # Oracle: measurement-then-concurrence over a grid of bases on qubit 1.
    grid = [_measured_average(w_state(3), bloch_basis(t, p))
            for t in np.linspace(0, np.pi, 13) for p in np.linspace(0, 2 * np.pi, 12)]
    assert max(grid) == pytest.approx(2 / 3, abs=1e-9)
    assert min(grid) == pytest.approx(2 / 3, abs=1e-9)
    assert localizable_entanglement(w_state(3), (2, 3)) == pytest.approx(2 / 3, abs=1e-3)


def test_localizable_entanglement_of_four_qubit_ghz():
    assert localizable_entanglement(ghz_state(4), (1, 4), grid_resolution=5) == pytest.approx(1, abs=1e-6)


def test_localizable_entanglement_argument_checks():
    with pytest.raises(EntanglementError):
        localizable_entanglement(ghz_state(3), (2, 2))
    with pytest.raises(EntanglementError):
        localizable_entanglement(ghz_state(5), (1, 2))


# Separable baseline -----------------------------------------------------------


def test_all_measures_vanish_on_product_states():
    psi = PRODUCT3
    assert schmidt_measure(psi).value == 0
    assert global_entanglement(psi) == pytest.approx(0, abs=1e-12)
    assert geometric_measure(psi, restarts=3).value == pytest.approx(0, abs=1e-6)
    assert tangle(psi) == pytest.approx(0, abs=1e-12)
    assert entropy_of_entanglement(psi, [1]) == pytest.approx(0, abs=1e-10)
    assert concurrence_2q(partial_trace(psi.to_density(), [1, 2])) == pytest.approx(0, abs=1e-7)
