"""Pauli-group arithmetic in symplectic form, stabilizer groups, and graph states.

A :class:`PauliString` stores ``i^phase ⊗_a σ(x_a, z_a)`` where ``σ(0,0)=I``,
``σ(1,0)=X``, ``σ(0,1)=Z`` and ``σ(1,1)=Y``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import EntanglementError, PureState, as_pure, bipartite_matrix, numerical_rank
from .witnesses import PAULI

_LETTER = {(0, 0): "I", (1, 0): "X", (0, 1): "Z", (1, 1): "Y"}
_BITS = {v: k for k, v in _LETTER.items()}
_PHASE_TOKEN = {"": 0, "+": 0, "i": 1, "+i": 1, "-": 2, "-i": 3}
_PHASE_TEXT = {0: "", 1: "i", 2: "-", 3: "-i"}


@dataclass(frozen=True)
class PauliString:
    phase: int
    x: tuple
    z: tuple

    def __post_init__(self):
        if len(self.x) != len(self.z):
            raise EntanglementError("x and z bit-vectors differ in length")
        object.__setattr__(self, "phase", int(self.phase) % 4)
        object.__setattr__(self, "x", tuple(int(b) & 1 for b in self.x))
        object.__setattr__(self, "z", tuple(int(b) & 1 for b in self.z))

    @property
    def n_qubits(self) -> int:
        return len(self.x)

    @classmethod
    def from_label(cls, text: str) -> "PauliString":
        """Parse ``"XZII"``, ``"-XZ"``, ``"iYY"``, ``"-iZ"``."""
        m = re.fullmatch(r"\s*([+-]?i?)([IXYZ]+)\s*", text)
        if not m:
            raise EntanglementError(f"cannot parse Pauli string {text!r}")
        bits = [_BITS[ch] for ch in m.group(2)]
        return cls(_PHASE_TOKEN[m.group(1)], [b[0] for b in bits], [b[1] for b in bits])

    @classmethod
    def identity(cls, n: int) -> "PauliString":
        return cls(0, (0,) * n, (0,) * n)

    @classmethod
    def single(cls, n: int, ops: dict) -> "PauliString":
        """Build from ``{party: letter}`` with 1-based parties."""
        x, z = [0] * n, [0] * n
        for p, ch in ops.items():
            x[p - 1], z[p - 1] = _BITS[ch]
        return cls(0, x, z)

    @property
    def labels(self) -> str:
        return "".join(_LETTER[b] for b in zip(self.x, self.z))

    def __str__(self):
        return _PHASE_TEXT[self.phase] + self.labels

    def is_hermitian(self) -> bool:
        return self.phase % 2 == 0

    def to_matrix(self) -> np.ndarray:
        out = np.ones((1, 1), dtype=complex)
        for ch in self.labels:
            out = np.kron(out, PAULI[ch])
        return (1j**self.phase) * out

    def symplectic(self) -> np.ndarray:
        return np.array(self.x + self.z, dtype=np.uint8)

    def __mul__(self, other: "PauliString") -> "PauliString":
        return pauli_multiply(self, other)

    def inverse(self) -> "PauliString":
        # Every σ squares to 1, so (i^k σ)^{-1} = i^{-k} σ.
        return PauliString(-self.phase, self.x, self.z)


def _xz_phase(p: PauliString) -> int:
    """Phase of ``p`` when rewritten as ``i^k X^x Z^z`` (using ``Y = i X Z``)."""
    return (p.phase + sum(a & b for a, b in zip(p.x, p.z))) % 4


def pauli_multiply(a: PauliString, b: PauliString) -> PauliString:
    if a.n_qubits != b.n_qubits:
        raise EntanglementError("Pauli strings act on different numbers of qubits")
    # (X^x1 Z^z1)(X^x2 Z^z2) = (-1)^{z1·x2} X^{x1+x2} Z^{z1+z2}
    k = _xz_phase(a) + _xz_phase(b) + 2 * sum(z1 & x2 for z1, x2 in zip(a.z, b.x))
    x = tuple(p ^ q for p, q in zip(a.x, b.x))
    z = tuple(p ^ q for p, q in zip(a.z, b.z))
    k -= sum(p & q for p, q in zip(x, z))
    return PauliString(k, x, z)


def pauli_commutes(a: PauliString, b: PauliString) -> bool:
    if a.n_qubits != b.n_qubits:
        raise EntanglementError("Pauli strings act on different numbers of qubits")
    s = sum(x1 & z2 for x1, z2 in zip(a.x, b.z)) + sum(z1 & x2 for z1, x2 in zip(a.z, b.x))
    return s % 2 == 0


def gf2_rank(rows: np.ndarray) -> int:
    m = np.array(rows, dtype=np.uint8) % 2
    rank = 0
    for col in range(m.shape[1]):
        pivot = next((r for r in range(rank, m.shape[0]) if m[r, col]), None)
        if pivot is None:
            continue
        m[[rank, pivot]] = m[[pivot, rank]]
        for r in range(m.shape[0]):
            if r != rank and m[r, col]:
                m[r] ^= m[rank]
        rank += 1
    return rank


@dataclass(frozen=True)
class StabilizerGroup:
    generators: tuple

    def __post_init__(self):
        gens = tuple(g if isinstance(g, PauliString) else PauliString.from_label(g)
                     for g in self.generators)
        object.__setattr__(self, "generators", gens)
        if not gens:
            raise EntanglementError("need at least one generator")
        n = gens[0].n_qubits
        if any(g.n_qubits != n for g in gens):
            raise EntanglementError("generators act on different numbers of qubits")
        if len(gens) != n:
            raise EntanglementError(f"need exactly {n} generators for {n} qubits, got {len(gens)}")
        for i, g in enumerate(gens):
            if not g.is_hermitian():
                # i-phases square to -1, which would put -1 in the group.
                raise EntanglementError(f"generator {g} is not Hermitian")
            for h in gens[i + 1:]:
                if not pauli_commutes(g, h):
                    raise EntanglementError(f"generators {g} and {h} anticommute")
        if gf2_rank(np.array([g.symplectic() for g in gens])) != n:
            raise EntanglementError("generators are not independent")

    @property
    def n_qubits(self) -> int:
        return self.generators[0].n_qubits

    @classmethod
    def from_labels(cls, labels: Iterable[str]) -> "StabilizerGroup":
        return cls(tuple(PauliString.from_label(s) for s in labels))

    def projector(self) -> np.ndarray:
        d = 2**self.n_qubits
        proj = np.eye(d, dtype=complex)
        for g in self.generators:
            proj = proj @ (np.eye(d) + g.to_matrix()) / 2
        return proj

    def row_reduced(self) -> "StabilizerGroup":
        """Equivalent generator set in GF(2) reduced row-echelon form.

        Row operations are group multiplications, so phases are carried along.
        """
        gens = list(self.generators)
        n = self.n_qubits
        rank = 0
        for col in range(2 * n):
            pivot = next((r for r in range(rank, n) if gens[r].symplectic()[col]), None)
            if pivot is None:
                continue
            gens[rank], gens[pivot] = gens[pivot], gens[rank]
            for r in range(n):
                if r != rank and gens[r].symplectic()[col]:
                    gens[r] = pauli_multiply(gens[r], gens[rank])
            rank += 1
        return StabilizerGroup(tuple(gens))


def _fix_global_phase(v: np.ndarray) -> np.ndarray:
    k = int(np.flatnonzero(np.abs(v) > 1e-12)[0])
    return v * np.exp(-1j * np.angle(v[k]))


def stabilizer_state(group: StabilizerGroup) -> PureState:
    """Unique joint ``+1`` eigenvector of the generators.

    The first amplitude with non-zero magnitude is made real and positive.
    """
    proj = group.projector()
    if numerical_rank(proj) != 1:
        raise EntanglementError("stabilizer projector does not have rank one")
    d = proj.shape[0]
    for idx in range(d):
        v = proj[:, idx]  # projector applied to basis state |idx>
        nrm = np.linalg.norm(v)
        if nrm > 1e-8:
            v = _fix_global_phase(v / nrm)
            for g in group.generators:
                if np.max(np.abs(g.to_matrix() @ v - v)) > 1e-10:
                    raise ArithmeticError(f"{g} does not stabilize the constructed state")
            return PureState.from_vector(v, normalize=True)
    raise EntanglementError("projector annihilated every fiducial vector")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``1..n_vertices``."""

    n_vertices: int
    edges: frozenset

    def __post_init__(self):
        es = set()
        for e in self.edges:
            a, b = (int(v) for v in e)
            if a == b:
                raise EntanglementError(f"self-loop at vertex {a}")
            if not (1 <= a <= self.n_vertices and 1 <= b <= self.n_vertices):
                raise EntanglementError(f"edge {(a, b)} out of range")
            es.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(es))

    def neighbors(self, a: int) -> set:
        return {b for e in self.edges for b in e if a in e and b != a}

    @classmethod
    def linear(cls, n: int) -> "Graph":
        return cls(n, frozenset((a, a + 1) for a in range(1, n)))

    @classmethod
    def star(cls, n: int, center: int = 1) -> "Graph":
        return cls(n, frozenset((center, b) for b in range(1, n + 1) if b != center))

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, frozenset((a, b) for a in range(1, n + 1) for b in range(a + 1, n + 1)))

    def is_connected(self) -> bool:
        seen, todo = {1}, [1]
        while todo:
            a = todo.pop()
            for b in self.neighbors(a) - seen:
                seen.add(b)
                todo.append(b)
        return len(seen) == self.n_vertices

    def to_dict(self) -> dict:
        return {"n_vertices": self.n_vertices, "edges": [list(e) for e in sorted(self.edges)]}


def graph_generators(g: Graph) -> StabilizerGroup:
    """``K_a = X_a prod_{b in N(a)} Z_b`` for every vertex ``a``."""
    gens = []
    for a in range(1, g.n_vertices + 1):
        ops = {b: "Z" for b in g.neighbors(a)}
        ops[a] = "X"
        gens.append(PauliString.single(g.n_vertices, ops))
    return StabilizerGroup(tuple(gens))


def graph_state(g: Graph) -> PureState:
    return stabilizer_state(graph_generators(g))


def graph_state_amplitudes(g: Graph) -> np.ndarray:
    """Closed form ``2^{-N/2} (-1)^{sum_{(a,b) in E} b_a b_b}``, an independent route."""
    n = g.n_vertices
    out = np.empty(2**n)
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - a)) & 1 for a in range(n)]
        out[idx] = (-1) ** sum(bits[a - 1] * bits[b - 1] for a, b in g.edges)
    return out / 2 ** (n / 2)


def cluster_product_expansion(n: int) -> np.ndarray:
    """Literal expansion of ``2^{-n/2} ⊗_a (|0>_a Z_{a+1} + |1>_a)`` with ``Z_{n+1} = 1``.

    Each ``Z_{a+1}`` acts on the ket chosen for party ``a+1``, so the amplitude of
    ``b`` is ``2^{-n/2} (-1)^{sum_a (1 - b_a) b_{a+1}}``. This equals
    ``Z_2 ... Z_n`` applied to the linear-graph state.
    """
    out = np.empty(2**n)
    for idx in range(2**n):
        bits = [(idx >> (n - 1 - a)) & 1 for a in range(n)]
        out[idx] = (-1) ** sum((1 - bits[a]) * bits[a + 1] for a in range(n - 1))
    return out / 2 ** (n / 2)


def schmidt_rank_across_cut(state, cut: Sequence[int], rtol: float = 1e-10) -> int:
    """Rank of the amplitude matrix for the bipartition ``cut | rest``."""
    state = as_pure(state)
    if state.n_qubits > 10:
        raise EntanglementError("dense Schmidt rank is limited to N <= 10")
    cut = list(cut.blocks[0]) if hasattr(cut, "blocks") else list(cut)
    return numerical_rank(bipartite_matrix(state, cut), rtol)
