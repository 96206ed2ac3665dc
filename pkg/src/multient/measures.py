"""Entanglement measures: entropy of entanglement, Schmidt measure, global
entanglement, geometric measure, concurrence and tangle, a relative-entropy
upper bound, and localizable entanglement.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .core import (
    RANK_RTOL,
    DensityOperator,
    EntanglementError,
    PureState,
    Split,
    as_density,
    as_pure,
    bipartite_matrix,
    entropy_of_spectrum,
    partial_trace,
    reduced_density,
)

_LN2 = np.log(2.0)


@dataclass
class MeasureResult:
    """A measure value with optional bounds, achieving ansatz and warnings."""

    measure_name: str
    value: Optional[float]
    lower: Optional[float] = None
    upper: Optional[float] = None
    ansatz: Optional[dict] = None
    flags: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "measure_name": self.measure_name,
            "value": self.value,
            "lower": self.lower,
            "upper": self.upper,
            "flags": list(self.flags),
        }
        if self.ansatz is not None:
            out["ansatz"] = self.ansatz
        out.update(self.details)
        return out


def _vectors_to_json(vectors) -> list:
    return [[[float(z.real), float(z.imag)] for z in v] for v in vectors]


# Bipartite --------------------------------------------------------------------


def entropy_of_entanglement(state, split) -> float:
    state = as_pure(state)
    if not isinstance(split, Split):
        split = Split.bipartition(split, state.n_qubits)
    if not split.is_bipartition() or split.n_parties != state.n_qubits:
        raise EntanglementError(f"{split} is not a bipartition")
    s = np.linalg.svd(bipartite_matrix(state, split.blocks[0]), compute_uv=False)
    return entropy_of_spectrum(s**2)


# Schmidt measure --------------------------------------------------------------


def schmidt_measure(state, seed=0, restarts: int = 20, rtol: float = RANK_RTOL) -> MeasureResult:
    """``log2`` of the minimal number of product terms.

    Exact for up to three qubits; otherwise the interval spanned by the
    tensor-rank bounds.
    """
    from .classification import tensor_rank_bounds

    b = tensor_rank_bounds(state, restarts=restarts, seed=seed, rtol=rtol)
    lo, hi = float(np.log2(b.lower)), float(np.log2(b.upper))
    value = float(np.log2(b.exact)) if b.exact is not None else None
    return MeasureResult("schmidt_measure", value, lo, hi, flags=list(b.flags))


# Global entanglement ----------------------------------------------------------


def _deletion_map(state: PureState, j: int, b: int) -> np.ndarray:
    """``f_j(b)|ψ>``: keep the components with ``b_j = b`` and drop that entry."""
    return np.take(state.tensor(), b, axis=j - 1).ravel()


def _wedge_distance(x: np.ndarray, y: np.ndarray) -> float:
    """``sum_{i<k} |x_i y_k - x_k y_i|^2``."""
    m = np.outer(x, y)
    m = m - m.T
    return float(np.sum(np.abs(m) ** 2) / 2)


def global_entanglement(state) -> float:
    state = as_pure(state)
    n = state.n_qubits
    if n < 2:
        raise EntanglementError("global entanglement needs at least two qubits")
    total = sum(
        _wedge_distance(_deletion_map(state, j, 0), _deletion_map(state, j, 1))
        for j in range(1, n + 1)
    )
    return 4.0 / n * total


# Geometric measure ------------------------------------------------------------


def _contract_except(tens: np.ndarray, vecs: list, skip: int) -> np.ndarray:
    """Contract every axis but ``skip`` with the conjugated local vectors."""
    out = tens
    for a in reversed(range(len(vecs))):
        if a == skip:
            continue
        out = np.tensordot(out, vecs[a].conj(), axes=([a], [0]))
    return out


def max_product_overlap(state, restarts: int = 50, seed=0, tol: float = 1e-12,
                        max_sweeps: int = 10_000):
    """Maximize ``|<φ_1 ... φ_N|ψ>|`` by alternating single-party updates.

    Returns ``(overlap_sq, vectors, converged)``.
    """
    state = as_pure(state)
    n = state.n_qubits
    tens = state.tensor()
    rng = np.random.default_rng(seed)
    best = (-1.0, None, False)
    for r in range(restarts):
        if r == 0:
            # Deterministic start from the dominant single-party reductions.
            vecs = []
            for a in range(1, n + 1):
                _, v = np.linalg.eigh(reduced_density(state, [a]))
                vecs.append(v[:, -1])
        else:
            vecs = []
            for _ in range(n):
                v = rng.normal(size=2) + 1j * rng.normal(size=2)
                vecs.append(v / np.linalg.norm(v))
        prev = -1.0
        converged = False
        for _ in range(max_sweeps):
            for a in range(n):
                g = _contract_except(tens, vecs, a)
                norm = np.linalg.norm(g)
                if norm > 0:
                    vecs[a] = g / norm
            ov = float(norm**2)
            if ov - prev < tol:
                converged = True
                break
            prev = ov
        if ov > best[0]:
            best = (ov, [v.copy() for v in vecs], converged)
    return best


def geometric_measure(state, restarts: int = 50, seed=0) -> MeasureResult:
    """``min ||ψψ† - σ||_2`` over pure product projectors ``σ``.

    Uses ``||ψψ† - φφ†||_2^2 = 2 - 2|<ψ|φ>|^2``; ``details['overlap_sq']``
    carries the maximal squared overlap.
    """
    state = as_pure(state)
    ov, vecs, converged = max_product_overlap(state, restarts=restarts, seed=seed)
    ov = min(ov, 1.0)
    distance = float(np.sqrt(max(2.0 - 2.0 * ov, 0.0)))
    # The overlap identity, checked on the achieving product state.
    phi = vecs[0]
    for v in vecs[1:]:
        phi = np.kron(phi, v)
    direct = np.linalg.norm(state.projector() - np.outer(phi, phi.conj()))
    if abs(direct - distance) > 1e-8:
        raise ArithmeticError(f"overlap identity violated: {direct} vs {distance}")
    flags = [] if converged else ["non_converged"]
    return MeasureResult(
        "geometric_measure", distance,
        ansatz={"local_vectors": _vectors_to_json(vecs)},
        flags=flags,
        details={"overlap_sq": ov},
    )


# Concurrence and tangle -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class ConcurrenceWork:
    """Intermediates of the two-qubit concurrence.

    ``rho_tilde = 1⊗1 - ρ1⊗1 - 1⊗ρ2 + ρ``; ``lambdas`` are the eigenvalues of
    ``ρ ρ_tilde`` in non-increasing order, obtained as the squared singular
    values of ``sqrt(ρ) sqrt(ρ_tilde)``.
    """

    rho_tilde: np.ndarray
    lambdas: np.ndarray

    @property
    def concurrence(self) -> float:
        r = np.sqrt(np.clip(self.lambdas, 0, None))
        return float(max(0.0, r[0] - r[1] - r[2] - r[3]))


# Eigenvalues below this fraction of the largest are eigensolver noise. Left in,
# their square roots (~1e-8) would swamp the tangle of W-class states.
_SQRT_FLOOR = 1e-13


def _psd_sqrt(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    w = np.where(w > _SQRT_FLOOR * max(w[-1], 0.0), w, 0.0)
    return (v * np.sqrt(w)) @ v.conj().T


def concurrence_work(rho) -> ConcurrenceWork:
    rho = as_density(rho)
    if rho.n_qubits != 2:
        raise EntanglementError("concurrence is defined here for two qubits")
    m = rho.matrix
    r1 = partial_trace(rho, [1]).matrix
    r2 = partial_trace(rho, [2]).matrix
    eye = np.eye(2)
    rt = np.eye(4) - np.kron(r1, eye) - np.kron(eye, r2) + m
    s = np.linalg.svd(_psd_sqrt(m) @ _psd_sqrt(rt), compute_uv=False)
    return ConcurrenceWork(rt, np.sort(s**2)[::-1])


def concurrence_2q(rho) -> float:
    return concurrence_work(rho).concurrence


def pure_concurrence(psi: np.ndarray) -> float:
    """``2|ad - bc|`` for a (possibly unnormalized) two-qubit vector, divided by its norm^2."""
    psi = np.asarray(psi, dtype=complex).ravel()
    nrm = np.vdot(psi, psi).real
    if nrm == 0:
        return 0.0
    return float(2 * abs(psi[0] * psi[3] - psi[1] * psi[2]) / nrm)


def tangle(state) -> float:
    """Residual three-qubit entanglement ``C²(1|23) - C²(1|2) - C²(1|3)``."""
    if isinstance(state, DensityOperator):
        raise TypeError("the tangle is implemented for pure three-qubit states only")
    state = as_pure(state)
    if state.n_qubits != 3:
        raise EntanglementError("tangle needs a three-qubit state")
    r1 = reduced_density(state, [1])
    c_split = 4 * np.linalg.det(r1).real
    c_purity = 2 * (1 - np.trace(r1 @ r1).real)
    if abs(c_split - c_purity) > 1e-10:
        raise ArithmeticError("4 det ρ1 and 2(1 - tr ρ1²) disagree")
    rho = state.to_density()
    c12 = concurrence_2q(partial_trace(rho, [1, 2]))
    c13 = concurrence_2q(partial_trace(rho, [1, 3]))
    tau = c_split - c12**2 - c13**2
    if tau < -1e-9:
        raise ArithmeticError(f"negative tangle {tau}")
    return float(min(max(tau, 0.0), 1.0))


# Relative entropy of entanglement ---------------------------------------------


def relative_entropy(rho, sigma) -> float:
    """``S(ρ||σ)`` in bits; ``inf`` when ``supp ρ`` is not inside ``supp σ``."""
    rho = np.asarray(as_density(rho).matrix)
    sigma = np.asarray(sigma, dtype=complex)
    ws, vs = np.linalg.eigh(sigma)
    support = ws > 1e-12 * max(ws[-1], 1e-300)
    kernel = vs[:, ~support]
    if kernel.size and np.abs(kernel.conj().T @ rho @ kernel).max() > 1e-10:
        return float("inf")
    log_sigma = (vs[:, support] * np.log2(ws[support])) @ vs[:, support].conj().T
    wr = np.linalg.eigvalsh(rho)
    return float(-entropy_of_spectrum(wr) - np.trace(rho @ log_sigma).real)


class _SeparableModel:
    """``σ = (1-ε) Σ_k w_k ⊗_a |u_ka><u_ka| + ε 1/d`` with ``w = p²/Σp²``,
    ``u = v/|v|``; packs all parameters into one real vector."""

    def __init__(self, rho: np.ndarray, n: int, k: int, eps: float):
        self.rho, self.n, self.k, self.eps = rho, n, k, eps
        self.d = 2**n
        self.neg_entropy = -entropy_of_spectrum(np.linalg.eigvalsh(rho))

    def unpack(self, x):
        p = x[: self.k]
        v = x[self.k:].reshape(self.k, self.n, 2, 2)
        return p, v[..., 0] + 1j * v[..., 1]

    def components(self, v):
        u = v / np.linalg.norm(v, axis=-1, keepdims=True)
        phis = []
        for kk in range(self.k):
            phi = u[kk, 0]
            for a in range(1, self.n):
                phi = np.kron(phi, u[kk, a])
            phis.append(phi)
        return u, np.array(phis)

    def sigma(self, x):
        p, v = self.unpack(x)
        w = p**2 / np.sum(p**2)
        _, phis = self.components(v)
        s = (phis.T * w) @ phis.conj()
        return (1 - self.eps) * s + self.eps * np.eye(self.d) / self.d, w, phis

    def value_and_grad(self, x):
        p, v = self.unpack(x)
        sig, w, phis = self.sigma(x)
        lam, U = np.linalg.eigh(sig)
        lam = np.clip(lam, 1e-300, None)
        a = U.conj().T @ self.rho @ U
        loglam = np.log(lam)
        f = self.neg_entropy - float(np.real(np.sum(np.diag(a) * loglam))) / _LN2
        # Divided differences of log for the Fréchet derivative.
        dl = lam[:, None] - lam[None, :]
        same = np.abs(dl) <= 1e-12 * np.maximum(lam[:, None], lam[None, :])
        with np.errstate(divide="ignore", invalid="ignore"):
            gam = np.where(same, 1.0 / lam[:, None], (loglam[:, None] - loglam[None, :]) / dl)
        # dF/dσ (as the matrix G with dF = Re tr[G dσ]).
        G = -(1 - self.eps) / _LN2 * (U @ (gam * a) @ U.conj().T)
        # Weights.
        h = np.real(np.einsum("ki,ij,kj->k", phis.conj(), G, phis))
        s2 = np.sum(p**2)
        gp = 2 * p / s2 * (h - np.dot(w, h))
        # Local vectors: Wirtinger gradient w.r.t. conj(phi_k) is w_k G phi_k.
        u, _ = self.components(v)
        gv = np.zeros((self.k, self.n, 2), dtype=complex)
        for kk in range(self.k):
            gphi = (w[kk] * (G @ phis[kk])).reshape((2,) * self.n)
            for a in range(self.n):
                g = gphi
                for b in reversed(range(self.n)):
                    if b != a:
                        g = np.tensordot(g, u[kk, b].conj(), axes=([b], [0]))
                # conj is already in the Wirtinger convention: dF = 2 Re <g, dphi>
                ua = u[kk, a]
                nv = np.linalg.norm(v[kk, a])
                gv[kk, a] = (g - ua * np.real(np.vdot(ua, g))) / nv
        # dF = 2 Re <gv, dv>  ->  real/imag parts get 2 Re, 2 Im.
        grad_v = np.stack([2 * gv.real, 2 * gv.imag], axis=-1).ravel()
        return f, np.concatenate([gp, grad_v])


def relative_entropy_of_entanglement_ub(rho, K: Optional[int] = None, restarts: int = 4,
                                        seed=0, eps: float = 1e-9,
                                        max_iter: int = 2000) -> MeasureResult:
    """Upper bound on the relative entropy of entanglement w.r.t. fully separable states.

    Minimizes ``S(ρ||σ)`` over ``K``-term mixtures of pure product states
    (default ``K = 2^N``) with L-BFGS; ``σ`` is kept full rank by mixing in
    ``eps`` of the identity. Returns the best value and its ansatz.
    """
    rho = as_density(rho)
    n = rho.n_qubits
    if n > 3:
        raise EntanglementError("relative entropy bound is limited to N <= 3")
    k = 2**n if K is None else int(K)
    if k < 2**n:
        raise EntanglementError(f"K must be at least 2^N = {2**n}")
    model = _SeparableModel(np.asarray(rho.matrix), n, k, eps)
    rng = np.random.default_rng(seed)
    best = None
    for r in range(restarts):
        if r == 0:
            # Start from the eigenbasis-free product basis: computational states.
            p = np.ones(k)
            v = np.zeros((k, n, 2, 2))
            for kk in range(k):
                bits = [(kk >> (n - 1 - a)) & 1 for a in range(n)] if kk < 2**n else rng.integers(0, 2, n)
                for a in range(n):
                    v[kk, a, bits[a], 0] = 1.0
                    v[kk, a, :, :] += 0.05 * rng.normal(size=(2, 2))
            x0 = np.concatenate([p, v.ravel()])
        else:
            x0 = np.concatenate([rng.uniform(0.5, 1.5, k), rng.normal(size=k * n * 4)])
        res = minimize(model.value_and_grad, x0, jac=True, method="L-BFGS-B",
                       options={"maxiter": max_iter, "gtol": 1e-10, "ftol": 1e-14})
        if best is None or res.fun < best.fun:
            best = res
    sig, w, _ = model.sigma(best.x)
    _, v = model.unpack(best.x)
    u, _ = model.components(v)
    value = max(float(best.fun), 0.0)
    flags = [] if best.success else ["non_converged"]
    ansatz = {
        "weights": [float(x) for x in w],
        "components": [_vectors_to_json(u[kk]) for kk in range(k)],
    }
    return MeasureResult("relative_entropy_of_entanglement_ub", value, upper=value,
                         ansatz=ansatz, flags=flags)


# Localizable entanglement -----------------------------------------------------


def bloch_basis(theta: float, phi: float) -> np.ndarray:
    """Orthonormal qubit basis whose first vector points at Bloch angles (θ, φ)."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    e = np.exp(1j * phi)
    return np.array([[c, e * s], [-np.conj(e) * s, c]])


def _average_pair_concurrence(tens: np.ndarray, others: list, angles) -> float:
    """Average pair concurrence after measuring ``others`` (0-based axes, in order)."""
    n_others = len(others)
    bases = [bloch_basis(angles[2 * i], angles[2 * i + 1]) for i in range(n_others)]
    # Move measured axes to the front, pair axes last.
    t = tens
    for i in range(n_others):
        t = np.tensordot(bases[i].conj(), t, axes=([1], [i]))
    t = t.reshape(2**n_others, 4)
    return float(sum(2 * abs(r[0] * r[3] - r[1] * r[2]) for r in t))


def localizable_entanglement(state, pair: Sequence[int], grid_resolution: int = 9,
                             refine: bool = True) -> float:
    """Largest outcome-averaged concurrence of ``pair`` over local projective
    measurements on every other party."""
    state = as_pure(state)
    n = state.n_qubits
    if n > 4:
        raise EntanglementError("localizable entanglement is limited to N <= 4")
    pair = tuple(sorted(int(p) for p in pair))
    if len(pair) != 2 or pair[0] == pair[1] or pair[0] < 1 or pair[1] > n:
        raise EntanglementError(f"invalid pair {pair}")
    others = [p for p in range(1, n + 1) if p not in pair]
    order = [p - 1 for p in others] + [p - 1 for p in pair]
    tens = state.tensor().transpose(order)
    if not others:
        return pure_concurrence(tens.ravel())

    def avg(x):
        return _average_pair_concurrence(tens, others, x)

    thetas = np.linspace(0, np.pi, grid_resolution)
    phis = np.linspace(0, 2 * np.pi, 2 * grid_resolution - 2, endpoint=False)
    single = list(itertools.product(thetas, phis))
    best_x, best_v = None, -1.0
    for combo in itertools.product(single, repeat=len(others)):
        x = np.array([a for tp in combo for a in tp])
        v = avg(x)
        if v > best_v:
            best_x, best_v = x, v
    if refine:
        res = minimize(lambda x: -avg(x), best_x, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 4000})
        best_v = max(best_v, -res.fun)
    return float(min(best_v, 1.0))
