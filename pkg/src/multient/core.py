"""State containers and the dense linear algebra shared by every other module.

Conventions
-----------
Parties are labelled ``1..N``. A computational basis label ``b_1 b_2 ... b_N``
lives at amplitude index ``sum_a b_a * 2**(N - a)``, i.e. party 1 is the most
significant bit. :func:`basis_index` and :func:`basis_bits` are the only places
that encode this; everything else goes through ``reshape((2,) * n)`` which
follows the same C-order convention.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
PSD_TOL = 1e-10
RANK_RTOL = 1e-10
ORTHONORMAL_TOL = 1e-10


class EntanglementError(ValueError):
    """Invalid input to an entanglement routine."""


class NonConvergenceError(RuntimeError):
    """A numerical procedure failed to meet its stated tolerance."""


def basis_index(bits: Sequence[int]) -> int:
    """Amplitude index of the basis label ``bits`` (party 1 first)."""
    idx = 0
    for b in bits:
        if b not in (0, 1):
            raise EntanglementError(f"basis bits must be 0/1, got {b!r}")
        idx = 2 * idx + int(b)
    return idx


def basis_bits(index: int, n_qubits: int) -> tuple[int, ...]:
    """Inverse of :func:`basis_index`."""
    if not 0 <= index < 2**n_qubits:
        raise EntanglementError(f"index {index} out of range for {n_qubits} qubits")
    return tuple((index >> (n_qubits - 1 - a)) & 1 for a in range(n_qubits))


def _n_qubits_for(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 1 or 2**n != dim:
        raise EntanglementError(f"dimension {dim} is not 2**n with n >= 1")
    return n


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=complex, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class PureState:
    """Normalized state vector on ``n_qubits`` qubits."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if self.n_qubits < 1:
            raise EntanglementError("n_qubits must be positive")
        if amps.shape != (2**self.n_qubits,):
            raise EntanglementError(
                f"expected {2**self.n_qubits} amplitudes, got {amps.shape[0]}"
            )
        norm = np.linalg.norm(amps)
        if abs(norm - 1.0) > NORM_TOL:
            raise EntanglementError(f"state is not normalized (norm={norm:.15g})")
        object.__setattr__(self, "amplitudes", _frozen(amps))

    @classmethod
    def from_vector(cls, vector, normalize: bool = False) -> "PureState":
        v = np.asarray(vector, dtype=complex).ravel()
        n = _n_qubits_for(v.shape[0])
        if normalize:
            norm = np.linalg.norm(v)
            if norm == 0:
                raise EntanglementError("cannot normalize the zero vector")
            v = v / norm
        return cls(n, v)

    @classmethod
    def basis(cls, bits: Sequence[int]) -> "PureState":
        v = np.zeros(2 ** len(bits), dtype=complex)
        v[basis_index(bits)] = 1.0
        return cls(len(bits), v)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def tensor(self) -> np.ndarray:
        """Amplitudes as an ``n``-index array of shape ``(2,)*n``."""
        return self.amplitudes.reshape((2,) * self.n_qubits)

    def projector(self) -> np.ndarray:
        return np.outer(self.amplitudes, self.amplitudes.conj())

    def to_density(self) -> "DensityOperator":
        return DensityOperator(self.n_qubits, self.projector())

    def __repr__(self):
        return f"PureState(n_qubits={self.n_qubits})"


@dataclass(frozen=True, eq=False)
class DensityOperator:
    """Hermitian, positive, unit-trace matrix on ``n_qubits`` qubits."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        d = 2**self.n_qubits
        if m.shape != (d, d):
            raise EntanglementError(f"expected a {d}x{d} matrix, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > HERMITIAN_TOL:
            raise EntanglementError("density matrix is not Hermitian")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1.0) > NORM_TOL:
            raise EntanglementError(f"density matrix has trace {tr:.15g}")
        if np.linalg.eigvalsh(m)[0] < -PSD_TOL:
            raise EntanglementError("density matrix has a negative eigenvalue")
        object.__setattr__(self, "matrix", _frozen(m))

    @classmethod
    def from_matrix(cls, matrix) -> "DensityOperator":
        m = np.asarray(matrix, dtype=complex)
        return cls(_n_qubits_for(m.shape[0]), m)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityOperator":
        d = 2**n_qubits
        return cls(n_qubits, np.eye(d) / d)

    @property
    def dim(self) -> int:
        return 2**self.n_qubits

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def __repr__(self):
        return f"DensityOperator(n_qubits={self.n_qubits})"


def as_pure(state) -> PureState:
    if isinstance(state, PureState):
        return state
    if isinstance(state, DensityOperator):
        raise TypeError("expected a pure state, got a DensityOperator")
    return PureState.from_vector(state)


def as_density(state) -> DensityOperator:
    if isinstance(state, DensityOperator):
        return state
    if isinstance(state, PureState):
        return state.to_density()
    a = np.asarray(state, dtype=complex)
    if a.ndim == 1:
        return PureState.from_vector(a).to_density()
    return DensityOperator.from_matrix(a)


@dataclass(frozen=True)
class Split:
    """A set partition of the parties ``1..N`` into blocks.

    Blocks are stored sorted internally and ordered by their smallest element.
    ``str(Split(((1,), (2, 3))))`` gives ``'1-23'``, the paper-style notation.
    """

    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        blocks = tuple(tuple(sorted(int(p) for p in b)) for b in self.blocks)
        if any(len(b) == 0 for b in blocks):
            raise EntanglementError("split blocks must be non-empty")
        flat = [p for b in blocks for p in b]
        if len(flat) != len(set(flat)):
            raise EntanglementError("split blocks overlap")
        if sorted(flat) != list(range(1, len(flat) + 1)):
            raise EntanglementError("split blocks must cover parties 1..N exactly")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @property
    def n_parties(self) -> int:
        return sum(len(b) for b in self.blocks)

    def is_bipartition(self) -> bool:
        return len(self.blocks) == 2

    @classmethod
    def parse(cls, text: str) -> "Split":
        """Parse ``'1-23'`` style notation (single-digit parties) or ``'1,2|3'``."""
        if "|" in text:
            return cls(tuple(tuple(int(p) for p in b.split(",")) for b in text.split("|")))
        return cls(tuple(tuple(int(ch) for ch in b) for b in text.split("-")))

    @classmethod
    def bipartition(cls, part: Iterable[int], n_parties: int) -> "Split":
        a = tuple(sorted(set(int(p) for p in part)))
        b = tuple(p for p in range(1, n_parties + 1) if p not in a)
        return cls((a, b))

    def __str__(self):
        sep = "," if self.n_parties > 9 else ""
        blocks = [sep.join(str(p) for p in b) for b in self.blocks]
        return ("|" if sep else "-").join(blocks)


@dataclass(frozen=True)
class MeasurementRecord:
    outcome_label: int
    probability: float
    post_state: Optional[PureState]
    zero_probability: bool = False


def _check_parties(parties, n: int, what: str) -> tuple[int, ...]:
    ps = tuple(sorted(set(int(p) for p in parties)))
    if not ps:
        raise EntanglementError(f"{what} must be non-empty")
    if ps[0] < 1 or ps[-1] > n:
        raise EntanglementError(f"{what} {ps} out of range for {n} parties")
    return ps


def tensor_product(a: PureState, b: PureState) -> PureState:
    return PureState.from_vector(np.kron(a.amplitudes, b.amplitudes), normalize=True)


def product_state(vectors: Sequence) -> PureState:
    """Product of normalized single-qubit vectors, party 1 first."""
    v = np.ones(1, dtype=complex)
    for u in vectors:
        u = np.asarray(u, dtype=complex)
        v = np.kron(v, u / np.linalg.norm(u))
    return PureState.from_vector(v, normalize=True)


def partial_trace(rho, keep: Iterable[int]) -> DensityOperator:
    """Reduced state on the parties ``keep`` (1-based), kept in ascending order."""
    rho = as_density(rho)
    n = rho.n_qubits
    keep = _check_parties(keep, n, "keep")
    if len(keep) == n:
        return rho
    traced = [p for p in range(1, n + 1) if p not in keep]
    k = [p - 1 for p in keep]
    t = [p - 1 for p in traced]
    dk, dt = 2 ** len(k), 2 ** len(t)
    tens = rho.matrix.reshape((2,) * (2 * n))
    tens = tens.transpose(k + t + [n + i for i in k] + [n + i for i in t])
    red = np.einsum("ijkj->ik", tens.reshape(dk, dt, dk, dt))
    return DensityOperator(len(k), red)


def reduced_density(state: PureState, keep: Iterable[int]) -> np.ndarray:
    """Reduced density matrix straight from a pure state, without the full projector."""
    mat = bipartite_matrix(state, keep)
    return mat @ mat.conj().T


def partial_transpose(rho, subset: Iterable[int]) -> np.ndarray:
    """Transpose ``rho`` on the tensor factors listed in ``subset``."""
    rho = as_density(rho)
    n = rho.n_qubits
    subset = _check_parties(subset, n, "subset")
    if len(subset) == n:
        raise EntanglementError("partial transpose on all parties is a full transpose")
    axes = list(range(2 * n))
    for p in subset:
        axes[p - 1], axes[n + p - 1] = axes[n + p - 1], axes[p - 1]
    tens = rho.matrix.reshape((2,) * (2 * n)).transpose(axes)
    return tens.reshape(rho.dim, rho.dim)


def bipartite_matrix(state: PureState, part: Iterable[int]) -> np.ndarray:
    """Amplitudes reshaped to a ``2^|part| x 2^(N-|part|)`` matrix."""
    state = as_pure(state)
    n = state.n_qubits
    part = _check_parties(part, n, "part")
    rest = [p for p in range(1, n + 1) if p not in part]
    tens = state.tensor().transpose([p - 1 for p in part] + [p - 1 for p in rest])
    return tens.reshape(2 ** len(part), 2 ** len(rest))


def numerical_rank(matrix, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(np.atleast_2d(matrix), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def entropy_of_spectrum(p) -> float:
    p = np.clip(np.real(np.asarray(p)), 0.0, None)
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def von_neumann_entropy(rho) -> float:
    """Entropy in bits; ``0 log 0 = 0``."""
    rho = as_density(rho)
    return min(max(entropy_of_spectrum(rho.eigvalsh()), 0.0), float(rho.n_qubits))


def trace_norm(a) -> float:
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise EntanglementError(f"trace norm needs a square matrix, got shape {a.shape}")
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def fidelity_pure(a, b) -> float:
    a, b = as_pure(a), as_pure(b)
    if a.dim != b.dim:
        raise EntanglementError("states have different dimensions")
    return float(min(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2, 1.0))


def projective_measure_qubit(state, qubit: int, basis) -> list[MeasurementRecord]:
    """Measure one qubit in an orthonormal basis.

    Parameters
    ----------
    state : PureState
        State on ``N >= 2`` qubits.
    qubit : int
        1-based party label.
    basis : pair of length-2 vectors
        Outcome ``k`` corresponds to ``basis[k]``.

    Returns
    -------
    list of MeasurementRecord
        One record per outcome. ``post_state`` lives on the remaining ``N - 1``
        qubits in ascending order; it is ``None`` for zero-probability branches.
    """
    state = as_pure(state)
    n = state.n_qubits
    if n < 2:
        raise EntanglementError("need at least two qubits to keep a post-measurement state")
    if not 1 <= qubit <= n:
        raise EntanglementError(f"qubit {qubit} out of range")
    b = np.asarray(basis, dtype=complex)
    if b.shape != (2, 2) or np.max(np.abs(b.conj() @ b.T - np.eye(2))) > ORTHONORMAL_TOL:
        raise EntanglementError("measurement basis is not orthonormal")
    tens = np.moveaxis(state.tensor(), qubit - 1, 0).reshape(2, -1)
    records = []
    for k in range(2):
        post = b[k].conj() @ tens
        p = float(np.vdot(post, post).real)
        if p <= 1e-14:
            records.append(MeasurementRecord(k, 0.0, None, zero_probability=True))
        else:
            records.append(MeasurementRecord(k, p, PureState(n - 1, post / np.sqrt(p))))
    return records


Z_BASIS = np.eye(2, dtype=complex)
X_BASIS = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
Y_BASIS = np.array([[1, 1j], [1, -1j]], dtype=complex) / np.sqrt(2)


def haar_random_pure(n_qubits: int, seed=None) -> PureState:
    rng = np.random.default_rng(seed)
    d = 2**n_qubits
    v = rng.normal(size=d) + 1j * rng.normal(size=d)
    return PureState.from_vector(v, normalize=True)


def haar_random_unitary(dim: int, rng) -> np.ndarray:
    """Haar unitary via QR with the phase correction of Mezzadri."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def apply_local(state, ops: Sequence[np.ndarray], normalize: bool = True) -> PureState:
    """Apply ``ops[0] ⊗ ops[1] ⊗ ...`` to ``state``; renormalizes for filters."""
    state = as_pure(state)
    if len(ops) != state.n_qubits:
        raise EntanglementError("need one local operator per party")
    t = state.tensor()
    for a, op in enumerate(ops):
        t = np.moveaxis(np.tensordot(op, t, axes=([1], [a])), 0, a)
    return PureState.from_vector(t.ravel(), normalize=normalize)


# Named states -----------------------------------------------------------------


def ghz_state(n_qubits: int = 3) -> PureState:
    v = np.zeros(2**n_qubits, dtype=complex)
    v[0] = v[-1] = 1 / np.sqrt(2)
    return PureState(n_qubits, v)


def w_state(n_qubits: int = 3) -> PureState:
    v = np.zeros(2**n_qubits, dtype=complex)
    for a in range(n_qubits):
        v[1 << a] = 1.0
    return PureState.from_vector(v, normalize=True)


def bell_state(kind: str = "phi+") -> PureState:
    s = 1 / np.sqrt(2)
    vecs = {
        "phi+": [s, 0, 0, s],
        "phi-": [s, 0, 0, -s],
        "psi+": [0, s, s, 0],
        "psi-": [0, s, -s, 0],
    }
    if kind not in vecs:
        raise EntanglementError(f"unknown Bell state {kind!r}")
    return PureState(2, np.array(vecs[kind], dtype=complex))


def schmidt_pair(theta: float) -> PureState:
    """``sin θ |0,0> + cos θ |1,1>``."""
    return PureState.from_vector([np.sin(theta), 0, 0, np.cos(theta)], normalize=True)


def plus_state(n_qubits: int = 1) -> PureState:
    return PureState(n_qubits, np.full(2**n_qubits, 2 ** (-n_qubits / 2), dtype=complex))


def all_bipartitions(n: int) -> list[Split]:
    """Every unordered bipartition of ``1..n``; the block holding party 1 comes first."""
    out = []
    others = list(range(2, n + 1))
    for r in range(0, n - 1):
        for extra in itertools.combinations(others, r):
            out.append(Split.bipartition((1,) + extra, n))
    return out
