"""Shared test utilities and independent oracles."""
import numpy as np
from hypothesis import strategies as st

seeds = st.integers(0, 2**32 - 1)


def random_density(n, rng, rank=None):
    d = 2**n
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_qubit(rng):
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.linalg.norm(v)


def kron_all(mats):
    out = np.ones((1, 1) if np.ndim(mats[0]) == 2 else 1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


def binary_entropy(p):
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def partial_trace_loops(rho, n, keep):
    """Partial trace by explicit summation over basis labels."""
    keep = sorted(keep)
    traced = [a for a in range(1, n + 1) if a not in keep]
    dk = 2 ** len(keep)
    out = np.zeros((dk, dk), dtype=complex)
    for i in range(2**n):
        bi = [(i >> (n - a)) & 1 for a in range(1, n + 1)]
        for j in range(2**n):
            bj = [(j >> (n - a)) & 1 for a in range(1, n + 1)]
            if any(bi[a - 1] != bj[a - 1] for a in traced):
                continue
            ki = int("".join(str(bi[a - 1]) for a in keep), 2)
            kj = int("".join(str(bj[a - 1]) for a in keep), 2)
            out[ki, kj] += rho[i, j]
    return out


SY = np.array([[0, -1j], [1j, 0]])


def spin_flip_concurrence(rho):
    """Wootters' formula with the spin-flipped state (σy⊗σy) ρ* (σy⊗σy)."""
    yy = np.kron(SY, SY)
    r = rho @ yy @ rho.conj() @ yy
    ev = np.sort(np.sqrt(np.clip(np.linalg.eigvals(r).real, 0, None)))[::-1]
    return max(0.0, ev[0] - ev[1] - ev[2] - ev[3])


def purity_global_entanglement(psi, n):
    """``2(1 - mean_j tr ρ_j²)`` from single-site reductions."""
    t = np.asarray(psi).reshape((2,) * n)
    total = 0.0
    for j in range(n):
        m = np.moveaxis(t, j, 0).reshape(2, -1)
        r = m @ m.conj().T
        total += np.trace(r @ r).real
    return 2 * (1 - total / n)


def symmetric_overlap_grid(psi, n, steps=721):
    """Max ``|<φ^⊗n|ψ>|²`` over ``φ = cos a|0> + e^{ib} sin a|1>`` on a grid."""
    best = 0.0
    a = np.linspace(0, np.pi / 2, steps)
    for b in np.linspace(0, 2 * np.pi, 73):
        phi = np.stack([np.cos(a), np.exp(1j * b) * np.sin(a)], axis=1)
        prod = phi
        for _ in range(n - 1):
            prod = np.einsum("si,sj->sij", prod, phi).reshape(len(a), -1)
        best = max(best, float(np.max(np.abs(prod.conj() @ psi) ** 2)))
    return best


def bell_numbers(n_max):
    """Bell numbers via the Bell triangle."""
    row = [1]
    out = [1]
    for _ in range(n_max):
        nxt = [row[-1]]
        for x in row:
            nxt.append(nxt[-1] + x)
        row = nxt
        out.append(row[0])
    return out
