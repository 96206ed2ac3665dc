"""Entanglement witnesses: the GHZ and W witnesses, the ``Q - ε1`` construction,
evaluation, and expansion in the local Pauli basis."""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import EntanglementError, as_density, ghz_state, w_state

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_matrix(labels: str) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for ch in labels:
        out = np.kron(out, PAULI[ch])
    return out


@dataclass(frozen=True, eq=False)
class Witness:
    matrix: np.ndarray
    target_class: str
    epsilon: Optional[float] = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise EntanglementError("witness must be a square matrix")
        if np.max(np.abs(m - m.conj().T)) > 1e-12:
            raise EntanglementError("witness must be Hermitian")
        m = (m + m.conj().T) / 2
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_qubits(self) -> int:
        return int(round(np.log2(self.matrix.shape[0])))


def ghz_witness() -> Witness:
    """``(3/4) 1 - |GHZ><GHZ|``; negative expectation excludes the W class."""
    return Witness(0.75 * np.eye(8) - ghz_state(3).projector(), "GHZ-witness")


def w_witness() -> Witness:
    """``(2/3) 1 - |W><W|``; negative expectation excludes bi-separable states."""
    return Witness(2.0 / 3.0 * np.eye(8) - w_state(3).projector(), "W-witness")


def custom_witness(Q, epsilon: float) -> Witness:
    """``Q - ε 1`` for positive semidefinite ``Q``.

    No class guarantee is attached: choosing ``ε`` so that the witness is
    non-negative on the intended convex set is the caller's responsibility.
    """
    Q = np.asarray(Q, dtype=complex)
    if not epsilon > 0:
        raise EntanglementError("epsilon must be positive")
    if np.max(np.abs(Q - Q.conj().T)) > 1e-12:
        raise EntanglementError("Q must be Hermitian")
    if np.linalg.eigvalsh((Q + Q.conj().T) / 2)[0] < -1e-10:
        raise EntanglementError("Q must be positive semidefinite")
    return Witness(Q - epsilon * np.eye(Q.shape[0]), "custom", float(epsilon))


def evaluate(w: Witness, rho) -> float:
    """``tr[W ρ]``."""
    rho = as_density(rho)
    if rho.matrix.shape != w.matrix.shape:
        raise EntanglementError("witness and state dimensions differ")
    val = np.trace(w.matrix @ rho.matrix)
    if abs(val.imag) > 1e-10:
        raise ArithmeticError(f"witness expectation has imaginary part {val.imag}")
    return float(val.real)


def crossing_parameter(w: Witness, rho0, rho1) -> Optional[float]:
    """The ``p`` in ``[0, 1]`` where ``tr[W((1-p)ρ0 + pρ1)]`` changes sign, by linearity."""
    e0, e1 = evaluate(w, rho0), evaluate(w, rho1)
    if e0 == e1 or (e0 > 0) == (e1 > 0):
        return None
    return e0 / (e0 - e1)


@dataclass(frozen=True)
class PauliDecomposition:
    n_qubits: int
    terms: tuple  # (coefficient, labels)

    def reconstruct(self) -> np.ndarray:
        d = 2**self.n_qubits
        out = np.zeros((d, d), dtype=complex)
        for c, labels in self.terms:
            out += c * pauli_matrix(labels)
        return out

    def expectation(self, rho) -> float:
        """``sum_α c_α tr[σ_α ρ]``: what local Pauli measurements would estimate."""
        rho = as_density(rho)
        return float(sum(c * np.trace(pauli_matrix(l) @ rho.matrix).real for c, l in self.terms))

    @property
    def n_settings(self) -> int:
        """Number of non-identity Pauli strings, a proxy for measurement settings."""
        return sum(1 for _, l in self.terms if set(l) != {"I"})

    def to_list(self) -> list:
        return [{"coefficient": c, "labels": l} for c, l in self.terms]


def pauli_decompose(w) -> PauliDecomposition:
    m = w.matrix if isinstance(w, Witness) else np.asarray(w, dtype=complex)
    d = m.shape[0]
    n = int(round(np.log2(d)))
    terms = []
    for labels in itertools.product("IXYZ", repeat=n):
        labels = "".join(labels)
        c = np.trace(pauli_matrix(labels) @ m) / d
        if abs(c) >= 1e-12:
            terms.append((float(c.real), labels))
    return PauliDecomposition(n, tuple(terms))
