"""Local-unitary normal forms: bipartite Schmidt form and the three-qubit
generalized Schmidt form ``λ0|000> + λ1 e^{iφ}|100> + λ2|101> + λ3|110> + λ4|111>``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import (
    EntanglementError,
    NonConvergenceError,
    PureState,
    Split,
    apply_local,
    as_pure,
    bipartite_matrix,
    fidelity_pure,
)

RECONSTRUCTION_TOL = 1e-9
_PHASE_ZERO = 1e-12


def lu_parameter_lower_bound(n: int) -> int:
    """Real parameters needed to label LU classes of ``n`` qubits: ``2^(n+1) - 3n - 2``."""
    if n < 1:
        raise EntanglementError("n must be >= 1")
    return 2 ** (n + 1) - 3 * n - 2


def slocc_parameter_lower_bound(n: int) -> int:
    """Same count for SLOCC classes, ``2^(n+1) - 6n - 2``. Negative for n <= 3."""
    if n < 1:
        raise EntanglementError("n must be >= 1")
    return 2 ** (n + 1) - 6 * n - 2


@dataclass(frozen=True, eq=False)
class SchmidtForm2:
    """Schmidt decomposition across a bipartition ``A|B``.

    ``coefficients`` are non-increasing. The input equals
    ``(U_A ⊗ U_B) canonical_vector()`` where the canonical vector is
    ``sum_i c_i |i>|i>``, except for two-dimensional cuts where it is written
    ``sin θ |0,0> + cos θ |1,1>`` (smaller coefficient first).
    """

    split: Split
    coefficients: np.ndarray
    local_unitaries: tuple
    theta: Optional[float]

    @property
    def schmidt_rank(self) -> int:
        c = self.coefficients
        return int(np.sum(c > 1e-10 * c[0]))

    def canonical_vector(self) -> np.ndarray:
        ua, ub = self.local_unitaries
        da, db = ua.shape[0], ub.shape[0]
        v = np.zeros((da, db), dtype=complex)
        if self.theta is not None:
            v[0, 0], v[1, 1] = np.sin(self.theta), np.cos(self.theta)
        else:
            for i, c in enumerate(self.coefficients):
                v[i, i] = c
        return v.ravel()

    def reconstruct(self) -> np.ndarray:
        """Amplitude matrix (rows: block A) rebuilt from the form."""
        ua, ub = self.local_unitaries
        v = self.canonical_vector().reshape(ua.shape[0], ub.shape[0])
        return ua @ v @ ub.T


def _swap_first_columns(u: np.ndarray) -> np.ndarray:
    order = np.arange(u.shape[1])
    order[:2] = (1, 0)
    return u[:, order]


def schmidt_decompose(state, split) -> SchmidtForm2:
    state = as_pure(state)
    if not isinstance(split, Split):
        split = Split.bipartition(split, state.n_qubits)
    if not split.is_bipartition() or split.n_parties != state.n_qubits:
        raise EntanglementError(f"{split} is not a bipartition of {state.n_qubits} parties")
    m = bipartite_matrix(state, split.blocks[0])
    w, s, vh = np.linalg.svd(m)
    ua, ub = w, vh.T  # m = ua diag(s) ub^T
    theta = None
    if min(m.shape) == 2:
        theta = float(np.arctan2(s[1], s[0]))
        # Swap the first two Schmidt vectors so the smaller coefficient leads.
        ua, ub = _swap_first_columns(ua), _swap_first_columns(ub)
    return SchmidtForm2(split, s, (ua, ub), theta)


@dataclass(frozen=True, eq=False)
class SliceMatrices:
    """``(T_i)_{jk} = α_{ijk}``: the two slices of a three-qubit state along party 1."""

    T0: np.ndarray
    T1: np.ndarray

    @classmethod
    def from_state(cls, state) -> "SliceMatrices":
        state = as_pure(state)
        if state.n_qubits != 3:
            raise EntanglementError("slice matrices need a 3-qubit state")
        t = state.tensor()
        return cls(t[0].copy(), t[1].copy())

    def determinant_polynomial(self) -> tuple[complex, complex, complex]:
        """Coefficients ``(c_aa, c_ab, c_bb)`` of ``det(a T0 + b T1)``."""
        d0 = np.linalg.det(self.T0)
        d1 = np.linalg.det(self.T1)
        mixed = np.linalg.det(self.T0 + self.T1) - d0 - d1
        return d0, mixed, d1

    def rotate(self, row) -> tuple[np.ndarray, np.ndarray]:
        """Slices after applying the unitary completed from ``row`` to party 1."""
        u = _complete_row(row)
        return (u[0, 0] * self.T0 + u[0, 1] * self.T1, u[1, 0] * self.T0 + u[1, 1] * self.T1)


@dataclass(frozen=True, eq=False)
class AcinForm:
    lambdas: np.ndarray
    phi: float
    local_unitaries: tuple

    def canonical_state(self) -> PureState:
        l0, l1, l2, l3, l4 = self.lambdas
        v = np.zeros(8, dtype=complex)
        v[0b000] = l0
        v[0b100] = l1 * np.exp(1j * self.phi)
        v[0b101] = l2
        v[0b110] = l3
        v[0b111] = l4
        return PureState.from_vector(v, normalize=True)

    def reconstruction_fidelity(self, state) -> float:
        return fidelity_pure(apply_local(state, self.local_unitaries), self.canonical_state())

    def to_dict(self) -> dict:
        return {
            "lambdas": [float(x) for x in self.lambdas],
            "phi": float(self.phi),
            "unitaries": [
                [[[float(z.real), float(z.imag)] for z in row] for row in u]
                for u in self.local_unitaries
            ],
        }


def _complete_row(row) -> np.ndarray:
    a, b = np.asarray(row, dtype=complex) / np.linalg.norm(row)
    return np.array([[a, b], [-np.conj(b), np.conj(a)]])


def _projective_roots(c_aa, c_ab, c_bb, slices: SliceMatrices) -> list[np.ndarray]:
    """Rows ``(a, b)`` with ``det(a T0 + b T1) = 0``.

    The quadratic is solved in whichever affine chart is better conditioned;
    near-double roots collapse onto the midpoint, which is accurate to machine
    precision where the individual roots are only accurate to its square root.
    """
    scale = max(abs(c_aa), abs(c_ab), abs(c_bb))
    if scale < 1e-14:
        # det(a T0 + b T1) vanishes identically: every row works, keep the one
        # maximizing ||a T0 + b T1||, which is what the root choice optimizes anyway.
        m = np.vstack([slices.T0.ravel(), slices.T1.ravel()])
        w, _, _ = np.linalg.svd(m)
        return [np.conj(w[:, 0])]
    swap = abs(c_aa) > abs(c_bb)
    # Solve lead*z^2 + mid*z + tail = 0 with z = b/a (or a/b when swapped).
    lead, mid, tail = (c_aa, c_ab, c_bb) if swap else (c_bb, c_ab, c_aa)
    if abs(lead) < 1e-13 * scale:
        roots = [0.0, np.inf]
    else:
        disc = mid * mid - 4 * lead * tail
        if abs(disc) <= 1e-13 * scale**2:
            roots = [-mid / (2 * lead)]
        else:
            sq = np.sqrt(disc)
            q = -(mid + sq) / 2 if abs(mid + sq) >= abs(mid - sq) else -(mid - sq) / 2
            roots = [q / lead, tail / q]
    rows = []
    for z in roots:
        if np.isinf(z):
            pair = np.array([0, 1], dtype=complex)
        else:
            pair = np.array([1, z], dtype=complex)
        if swap:
            pair = pair[::-1]
        rows.append(pair / np.linalg.norm(pair))
    return rows


def _form_from_row(state: PureState, slices: SliceMatrices, row) -> AcinForm:
    u1 = _complete_row(row)
    t0, _ = slices.rotate(row)
    w, _, vh = np.linalg.svd(t0)
    u2 = w.conj().T
    u3 = vh.conj()
    full = apply_local(state, (u1, u2, u3), normalize=False).tensor()
    m = full[1]
    lam0 = full[0, 0, 0]
    # Make λ0 real positive by a global phase folded into U1.
    g = np.exp(-1j * np.angle(lam0)) if abs(lam0) > _PHASE_ZERO else 1.0
    m = m * g

    # Phases a1 (|1>_1), b (|1>_2), c (|1>_3) rotate m_{jk} by a1 + j b + k c.
    rows = {(0, 0): (1, 0, 0), (0, 1): (1, 0, 1), (1, 0): (1, 1, 0), (1, 1): (1, 1, 1)}
    nonzero = [jk for jk in rows if abs(m[jk]) > _PHASE_ZERO]
    if len(nonzero) == 4:
        targets = [(0, 1), (1, 0), (1, 1)]
    else:
        targets = nonzero
    phases = np.zeros(3)
    if targets:
        a = np.array([rows[jk] for jk in targets], dtype=float)
        rhs = np.array([-np.angle(m[jk]) for jk in targets])
        phases = np.linalg.lstsq(a, rhs, rcond=None)[0]
    a1, b, c = phases
    phi = 0.0
    if len(nonzero) == 4:
        phi = float(np.mod(np.angle(m[0, 0]) + a1, 2 * np.pi))
        if phi > 2 * np.pi - 1e-12:
            phi = 0.0
    d1 = np.diag([g, g * np.exp(1j * a1)])
    d2 = np.diag([1.0, np.exp(1j * b)])
    d3 = np.diag([1.0, np.exp(1j * c)])
    lambdas = np.array([abs(lam0), abs(m[0, 0]), abs(m[0, 1]), abs(m[1, 0]), abs(m[1, 1])])
    lambdas = lambdas / np.linalg.norm(lambdas)
    return AcinForm(lambdas, phi, (d1 @ u1, d2 @ u2, d3 @ u3))


def acin_normal_form(state, tol: float = RECONSTRUCTION_TOL) -> AcinForm:
    """Three-qubit generalized Schmidt form.

    Both roots of ``det(T0 + z T1) = 0`` are tried. Exactly one of them
    generically lands the residual phase in ``[0, π]``; that one is returned.
    When both do (real states, degenerate cases) the larger ``λ0`` wins, then
    the smaller ``φ``.

    Raises
    ------
    NonConvergenceError
        If no root choice reconstructs the input to fidelity ``1 - tol``.
    """
    state = as_pure(state)
    slices = SliceMatrices.from_state(state)
    rows = _projective_roots(*slices.determinant_polynomial(), slices)
    candidates = []
    for row in rows:
        form = _form_from_row(state, slices, row)
        fid = form.reconstruction_fidelity(state)
        if fid >= 1 - tol:
            candidates.append(form)
    if not candidates:
        raise NonConvergenceError("no quadratic root reconstructed the state")

    def key(f: AcinForm):
        in_range = f.phi <= np.pi + 1e-12
        return (not in_range, -round(f.lambdas[0], 12), f.phi)

    best = min(candidates, key=key)
    if best.phi > np.pi + 1e-12:
        raise NonConvergenceError(f"no root gave a phase in [0, pi] (phi={best.phi})")
    if best.phi > np.pi:
        best = AcinForm(best.lambdas, float(np.pi), best.local_unitaries)
    return best
