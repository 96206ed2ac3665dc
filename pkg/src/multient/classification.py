"""SLOCC classes of three-qubit pure states, tensor-rank bounds, set partitions
and PPT/witness-based separability reports for mixed states.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .core import (
    RANK_RTOL,
    EntanglementError,
    PureState,
    Split,
    all_bipartitions,
    as_density,
    as_pure,
    bipartite_matrix,
    partial_transpose,
)
from .measures import tangle

TANGLE_THRESHOLD = 1e-8
# Quantities within this factor of their threshold are annotated as boundary cases.
_BOUNDARY_FACTOR = 100.0


class SloccClass(str, enum.Enum):
    PRODUCT = "Product"
    BISEP_1_23 = "Bisep_1_23"
    BISEP_2_13 = "Bisep_2_13"
    BISEP_3_12 = "Bisep_3_12"
    W = "W"
    GHZ = "GHZ"


_EXACT_RANK = {
    SloccClass.PRODUCT: 1,
    SloccClass.BISEP_1_23: 2,
    SloccClass.BISEP_2_13: 2,
    SloccClass.BISEP_3_12: 2,
    SloccClass.GHZ: 2,
    SloccClass.W: 3,
}


@dataclass(frozen=True)
class SloccClassification:
    label: SloccClass
    local_ranks: tuple
    tangle: float
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "slocc_class": self.label.value,
            "local_ranks": list(self.local_ranks),
            "tangle": self.tangle,
            "flags": list(self.flags),
        }


def _local_rank(state: PureState, party: int, rtol: float):
    s = np.linalg.svd(bipartite_matrix(state, [party]), compute_uv=False)
    ratio = s[1] / s[0]
    boundary = rtol / _BOUNDARY_FACTOR < ratio < rtol * _BOUNDARY_FACTOR
    return (2 if ratio > rtol else 1), boundary


def classify_slocc_3q(state, rtol: float = RANK_RTOL,
                      tangle_threshold: float = TANGLE_THRESHOLD) -> SloccClassification:
    """Assign one of the six SLOCC classes of three qubits.

    Local ranks separate product and biseparable states; among fully
    entangled states a non-vanishing tangle marks the GHZ class.
    """
    state = as_pure(state)
    if state.n_qubits != 3:
        raise EntanglementError("SLOCC classification is implemented for three qubits")
    ranks, flags = [], []
    for p in (1, 2, 3):
        r, boundary = _local_rank(state, p, rtol)
        ranks.append(r)
        if boundary:
            flags.append(f"boundary:local_rank_{p}")
    tau = tangle(state)
    n_product = ranks.count(1)
    if n_product == 3:
        label = SloccClass.PRODUCT
    elif n_product == 1:
        label = {0: SloccClass.BISEP_1_23, 1: SloccClass.BISEP_2_13,
                 2: SloccClass.BISEP_3_12}[ranks.index(1)]
    elif n_product == 2:
        # Impossible for exact pure states; reachable only at the rank tolerance.
        flags.append("inconsistent_local_ranks")
        label = SloccClass.PRODUCT
    else:
        if tangle_threshold / _BOUNDARY_FACTOR < tau < tangle_threshold * _BOUNDARY_FACTOR:
            flags.append("boundary:tangle")
        label = SloccClass.GHZ if tau > tangle_threshold else SloccClass.W
    return SloccClassification(label, tuple(ranks), tau, tuple(flags))


# Tensor rank ------------------------------------------------------------------


@dataclass(frozen=True)
class TensorRankBounds:
    lower: int
    upper: int
    exact: Optional[int] = None
    flags: tuple = ()
    residual: Optional[float] = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("lower bound exceeds upper bound")
        if self.exact is not None and not self.lower == self.exact == self.upper:
            raise ValueError("exact rank must coincide with both bounds")

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact,
                "flags": list(self.flags)}


def max_schmidt_rank(state, rtol: float = RANK_RTOL) -> int:
    state = as_pure(state)
    if state.n_qubits == 1:
        return 1
    best = 1
    for split in all_bipartitions(state.n_qubits):
        s = np.linalg.svd(bipartite_matrix(state, split.blocks[0]), compute_uv=False)
        best = max(best, int(np.sum(s > rtol * s[0])))
    return best


def _unfold(tens: np.ndarray, mode: int) -> np.ndarray:
    return np.moveaxis(tens, mode, 0).reshape(tens.shape[mode], -1)


def _khatri_rao(mats: list) -> np.ndarray:
    out = mats[0]
    for m in mats[1:]:
        out = np.einsum("ir,jr->ijr", out, m).reshape(-1, m.shape[1])
    return out


def cp_als(tens: np.ndarray, rank: int, rng, max_iter: int = 500, tol: float = 1e-8):
    """Complex rank-``rank`` CP fit by alternating least squares.

    Returns ``(residual_norm, factors)`` where ``factors[a]`` is ``2 x rank``.
    """
    n = tens.ndim
    factors = [rng.normal(size=(2, rank)) + 1j * rng.normal(size=(2, rank)) for _ in range(n)]
    unfolds = [_unfold(tens, a) for a in range(n)]
    resid = np.inf
    for _ in range(max_iter):
        for a in range(n):
            others = [factors[b] for b in range(n) if b != a]
            kr = _khatri_rao(others)
            # unfold_a ≈ F_a kr^T
            sol, *_ = np.linalg.lstsq(kr, unfolds[a].T, rcond=None)
            factors[a] = sol.T
        approx = _khatri_rao(factors).sum(axis=1)
        resid = float(np.linalg.norm(approx - tens.ravel()))
        if resid < tol:
            break
    return resid, factors


def tensor_rank_bounds(state, restarts: int = 20, max_iter: int = 500, tol: float = 1e-8,
                       seed=0, rtol: float = RANK_RTOL) -> TensorRankBounds:
    """Bounds on the minimal number of product terms of a pure state.

    ``lower`` is the largest Schmidt rank over all bipartitions. The upper
    bound is the smallest rank for which alternating least squares reaches a
    residual below ``tol``. Three-qubit states get the exact value from the
    SLOCC class, because ALS would happily approximate W at rank two.
    """
    state = as_pure(state)
    n = state.n_qubits
    lower = max_schmidt_rank(state, rtol)
    if n <= 2:
        return TensorRankBounds(lower, lower, lower)
    if n == 3:
        exact = _EXACT_RANK[classify_slocc_3q(state, rtol).label]
        return TensorRankBounds(exact, exact, exact)
    if n > 6:
        raise EntanglementError("tensor rank search is limited to N <= 6")
    trivial = 2 ** (n - 1)
    rng = np.random.default_rng(seed)
    tens = state.tensor()
    for r in range(lower, trivial):
        best = min(cp_als(tens, r, rng, max_iter, tol)[0] for _ in range(restarts))
        if best < tol:
            exact = r if r == lower else None
            return TensorRankBounds(lower, r, exact, residual=best)
    flags = ("search_budget_exhausted",) if lower < trivial else ()
    exact = trivial if lower == trivial else None
    return TensorRankBounds(lower, trivial, exact, flags)


# Splits -----------------------------------------------------------------------


def enumerate_splits(n: int) -> list[Split]:
    """All set partitions of ``1..n``; more blocks first, then lexicographic."""
    if not 1 <= n <= 8:
        raise EntanglementError("n must be between 1 and 8")
    out = []

    def grow(i, blocks):
        if i > n:
            out.append(Split(tuple(tuple(b) for b in blocks)))
            return
        for b in blocks:
            b.append(i)
            grow(i + 1, blocks)
            b.pop()
        blocks.append([i])
        grow(i + 1, blocks)
        blocks.pop()

    grow(1, [])
    return sorted(out, key=lambda s: (-len(s.blocks), s.blocks))


def induced_bipartitions(split: Split) -> list[tuple]:
    """Party sets (containing party 1) of the two-camp groupings of the split's blocks."""
    blocks = split.blocks
    camps = []
    rest = blocks[1:]
    for r in range(0, len(rest)):
        for extra in itertools.combinations(rest, r):
            camps.append(tuple(sorted(blocks[0] + tuple(p for b in extra for p in b))))
    return camps


# Separability -----------------------------------------------------------------

CERTIFIED = "certified_inseparable"
CONSISTENT = "consistent_with_separable"


@dataclass
class SeparabilityReport:
    """Per-split verdicts (sufficient conditions only) and a hierarchy label.

    A verdict of ``consistent_with_separable`` never asserts separability.
    """

    n_qubits: int
    verdicts: dict
    min_pt_eigenvalues: dict
    hierarchy_label: str
    witness_values: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n_qubits": self.n_qubits,
            "verdicts": {str(s): v for s, v in self.verdicts.items()},
            "min_pt_eigenvalues": {str(k): v for k, v in self.min_pt_eigenvalues.items()},
            "hierarchy_label": self.hierarchy_label,
            "witness_values": dict(self.witness_values),
            "notes": list(self.notes),
        }


def _refines(fine: Split, coarse: Split) -> bool:
    return all(any(set(b) <= set(c) for c in coarse.blocks) for b in fine.blocks)


def separability_report(rho, ppt_tol: float = 1e-10) -> SeparabilityReport:
    rho = as_density(rho)
    n = rho.n_qubits
    if n > 4:
        raise EntanglementError("separability report is limited to N <= 4")
    pt_min = {}
    for bip in all_bipartitions(n):
        camp = bip.blocks[0]
        pt_min[camp] = float(np.linalg.eigvalsh(partial_transpose(rho, camp))[0])
    verdicts = {}
    for split in enumerate_splits(n):
        npt = any(pt_min[c] < -ppt_tol for c in induced_bipartitions(split))
        verdicts[split] = CERTIFIED if npt else CONSISTENT
    # Refinements inherit certification from every coarser split.
    for coarse, v in list(verdicts.items()):
        if v == CERTIFIED:
            for fine in verdicts:
                if _refines(fine, coarse):
                    verdicts[fine] = CERTIFIED

    notes = ["verdicts are sufficient conditions only; separability is never certified"]
    witness_values = {}
    full = Split(tuple((p,) for p in range(1, n + 1)))
    if verdicts[full] == CONSISTENT:
        label = "S_candidate"
    elif n == 3:
        from .witnesses import evaluate, ghz_witness, w_witness

        g = evaluate(ghz_witness(), rho)
        w = evaluate(w_witness(), rho)
        witness_values = {"A_GHZ": g, "A_W": w}
        if g < 0:
            label = "GHZ_detected"
        elif w < 0:
            label = "beyond_B_detected"
        else:
            label = "B_candidate"
        notes.append("membership in the bi-separable sub-classes is not decided")
    else:
        label = "inconclusive"
    return SeparabilityReport(n, verdicts, {str(Split.bipartition(c, n)): v for c, v in pt_min.items()},
                              label, witness_values, notes)
