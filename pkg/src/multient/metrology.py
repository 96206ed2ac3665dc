"""Ramsey frequency estimation with entangled probes.

The phase ``(ω - ω0) t`` is imprinted by ``exp(-i (ω - ω0) t J_z)`` with
``J_z = sum_a Z_a / 2``. Each qubit dephases independently at rate ``γ``,
which multiplies the coherence ``ρ_{b,b'}`` by ``exp(-γ t d_H(b, b'))``. A
total time ``T`` allows ``T/t`` repetitions, so the frequency uncertainty is
``(F T / t)^{-1/2}`` for quantum Fisher information ``F`` per repetition.
"""
from __future__ import annotations

import functools
import itertools
from dataclasses import asdict, dataclass, replace
from typing import Optional

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .core import (
    DensityOperator,
    EntanglementError,
    PureState,
    plus_state,
)


@dataclass(frozen=True)
class RamseyConfig:
    omega0: float = 0.0
    t: float = 0.01
    T: float = 1.0
    gamma: float = 0.0
    n: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise EntanglementError("need at least one ion")
        if not self.t > 0 or not self.T > 0:
            raise EntanglementError("times must be positive")
        if self.t > self.T * (1 + 1e-12):
            raise EntanglementError("interrogation time t exceeds total time T")
        if self.gamma < 0:
            raise EntanglementError("dephasing rate must be non-negative")


@dataclass(frozen=True)
class UncertaintyReport:
    delta_omega0: float
    fisher_information: float
    scheme: str
    resources: RamseyConfig
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "delta_omega0": self.delta_omega0,
            "fisher_information": self.fisher_information,
            "scheme": self.scheme,
            "resources": asdict(self.resources),
            "flags": list(self.flags),
        }


def _report(F: float, cfg: RamseyConfig, scheme: str, flags=()) -> UncertaintyReport:
    return UncertaintyReport(float((F * cfg.T / cfg.t) ** -0.5), float(F), scheme, cfg, tuple(flags))


def ramsey_probability(cfg: RamseyConfig, omega: float) -> float:
    return float((1 + np.cos((omega - cfg.omega0) * cfg.t)) / 2)


def shot_noise_limit(cfg: RamseyConfig) -> UncertaintyReport:
    """``(N T t)^{-1/2}``: N independent ions, no dephasing."""
    return _report(cfg.n * cfg.t**2, cfg, "shot_noise")


def ghz_limit(cfg: RamseyConfig) -> UncertaintyReport:
    """``(T t)^{-1/2} / N`` for an ideal N-ion GHZ probe."""
    return _report(cfg.n**2 * cfg.t**2, cfg, "ghz")


def _basis_weights(n: int) -> np.ndarray:
    return np.array([bin(i).count("1") for i in range(2**n)])


def jz_diagonal(n: int) -> np.ndarray:
    return (n - 2 * _basis_weights(n)) / 2.0


@functools.lru_cache(maxsize=None)
def hamming_matrix(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    x = idx[:, None] ^ idx[None, :]
    bits = (x[..., None] >> np.arange(n)) & 1
    out = bits.sum(axis=-1)
    out.setflags(write=False)
    return out


def dephase(rho: np.ndarray, gamma: float, t: float) -> np.ndarray:
    """Independent dephasing of every qubit for time ``t``."""
    rho = np.asarray(rho, dtype=complex)
    n = int(round(np.log2(rho.shape[0])))
    return rho * np.exp(-gamma * t * hamming_matrix(n))


def _probe_matrix(probe) -> np.ndarray:
    if isinstance(probe, PureState):
        return probe.projector()
    if isinstance(probe, DensityOperator):
        return np.asarray(probe.matrix)
    a = np.asarray(probe, dtype=complex)
    return np.outer(a, a.conj()) if a.ndim == 1 else a


def qfi_pure(probe: PureState, t: float) -> float:
    """``4 t² Var(J_z)`` for a pure probe without dephasing."""
    jz = jz_diagonal(probe.n_qubits)
    p = np.abs(probe.amplitudes) ** 2
    return float(4 * t**2 * (np.dot(p, jz**2) - np.dot(p, jz) ** 2))


def qfi_mixed(rho: np.ndarray, t: float, cutoff: float = 1e-12) -> float:
    """``sum_{λi+λj>0} 2 |<i|∂ρ|j>|² / (λi + λj)`` with ``∂ρ = -i t [J_z, ρ]``."""
    n = int(round(np.log2(rho.shape[0])))
    jz = jz_diagonal(n)
    lam, v = np.linalg.eigh(rho)
    d = -1j * t * (jz[:, None] * rho - rho * jz[None, :])
    dd = v.conj().T @ d @ v
    s = lam[:, None] + lam[None, :]
    mask = s > cutoff
    return float(np.sum(2 * np.abs(dd[mask]) ** 2 / s[mask]))


def quantum_fisher_information(probe, t: float, gamma: float = 0.0) -> float:
    """QFI with respect to ``ω`` after free evolution ``t`` under dephasing ``γ``."""
    if gamma == 0 and isinstance(probe, PureState):
        return qfi_pure(probe, t)
    rho = _probe_matrix(probe)
    return qfi_mixed(dephase(rho, gamma, t), t)


# Four-qubit probe family ------------------------------------------------------

_W4 = _basis_weights(4)
_MULT = (2, 8, 6)


@dataclass(frozen=True)
class ProbeFamily4:
    """Weights of the permutation-symmetric family: ``lambda0`` on ``0000, 1111``,
    ``lambda1`` on weights 1 and 3, ``lambda2`` on weight 2."""

    lambda0: float
    lambda1: float
    lambda2: float

    def __post_init__(self):
        ls = (self.lambda0, self.lambda1, self.lambda2)
        if min(ls) < 0:
            raise EntanglementError("family weights must be non-negative")
        norm = sum(m * l * l for m, l in zip(_MULT, ls))
        if abs(norm - 1) > 1e-10:
            raise EntanglementError(f"2λ0² + 8λ1² + 6λ2² = {norm}, expected 1")

    @classmethod
    def from_angles(cls, a: float, b: float) -> "ProbeFamily4":
        """Spherical chart of the constraint surface; ``(a, b) ∈ [0, π/2]²``."""
        l0 = abs(np.cos(a) * np.cos(b)) / np.sqrt(2)
        l1 = abs(np.cos(a) * np.sin(b)) / np.sqrt(8)
        l2 = abs(np.sin(a)) / np.sqrt(6)
        return cls(float(l0), float(l1), float(l2))

    def angles(self) -> tuple[float, float]:
        u = np.sqrt(2) * self.lambda0, np.sqrt(8) * self.lambda1, np.sqrt(6) * self.lambda2
        a = float(np.arcsin(np.clip(u[2], -1, 1)))
        b = float(np.arctan2(u[1], u[0]))
        return a, b


UNCORRELATED_FAMILY = ProbeFamily4(0.25, 0.25, 0.25)
GHZ_FAMILY = ProbeFamily4(1 / np.sqrt(2), 0.0, 0.0)


def probe_state_4(family: ProbeFamily4) -> PureState:
    amps = np.zeros(16, dtype=complex)
    amps[(_W4 == 0) | (_W4 == 4)] = family.lambda0
    amps[(_W4 == 1) | (_W4 == 3)] = family.lambda1
    amps[_W4 == 2] = family.lambda2
    return PureState.from_vector(amps, normalize=True)


def uncertainty(probe, cfg: RamseyConfig, scheme: str = "probe") -> UncertaintyReport:
    return _report(quantum_fisher_information(probe, cfg.t, cfg.gamma), cfg, scheme)


def optimal_time(probe, cfg: RamseyConfig, scheme: str = "probe") -> UncertaintyReport:
    """Minimize ``δω0`` over the interrogation time ``t ∈ (0, T]``.

    Bounded scalar search on ``log t`` inside ``[1e-4/γ, min(10/γ, T)]``;
    with ``γ = 0`` the per-time information grows with ``t`` and ``t = T``.
    """
    rho = _probe_matrix(probe)
    if cfg.gamma == 0:
        return uncertainty(probe, replace(cfg, t=cfg.T), scheme)
    lo = np.log(1e-4 / cfg.gamma)
    hi = np.log(min(10 / cfg.gamma, cfg.T))
    if lo >= hi:
        lo = hi - np.log(1e4)

    def neg_rate(logt):
        t = np.exp(logt)
        return -qfi_mixed(dephase(rho, cfg.gamma, t), t) / t

    res = minimize_scalar(neg_rate, bounds=(lo, hi), method="bounded",
                          options={"xatol": 1e-10, "maxiter": 500})
    flags = () if res.success else ("non_converged",)
    t = float(np.exp(res.x))
    return _report(qfi_mixed(dephase(rho, cfg.gamma, t), t), replace(cfg, t=t), scheme, flags)


@dataclass(frozen=True)
class ProbeOptimization:
    family: ProbeFamily4
    report: UncertaintyReport
    baseline: UncertaintyReport
    improvement: float
    flags: tuple = ()

    def to_dict(self) -> dict:
        return {
            "family": asdict(self.family),
            "report": self.report.to_dict(),
            "baseline": self.baseline.to_dict(),
            "improvement": self.improvement,
            "flags": list(self.flags),
        }


def optimize_probe(cfg: RamseyConfig, grid: int = 13, restarts: int = 4, seed=0,
                   frozen: Optional[ProbeFamily4] = None) -> ProbeOptimization:
    """Jointly choose the family weights and ``t`` to minimize ``δω0``.

    ``improvement = δω0(uncorrelated, best t) / δω0(best family probe) - 1``.
    With ``frozen`` set, only ``t`` is optimized for that probe.
    """
    if cfg.n != 4:
        raise EntanglementError("the probe family is defined for four ions")
    baseline = optimal_time(plus_state(4), cfg, "uncorrelated")

    def score(x):
        fam = ProbeFamily4.from_angles(*np.clip(x, 0, np.pi / 2))
        return optimal_time(probe_state_4(fam), cfg, "family").delta_omega0

    if frozen is not None:
        best_x = np.array(frozen.angles())
    else:
        starts = [np.array(UNCORRELATED_FAMILY.angles()), np.array(GHZ_FAMILY.angles())]
        axis = np.linspace(0, np.pi / 2, grid)
        scored = sorted(((score(np.array(x)), np.array(x)) for x in itertools.product(axis, axis)),
                        key=lambda p: p[0])
        starts += [x for _, x in scored[:restarts]]
        rng = np.random.default_rng(seed)
        starts += [rng.uniform(0, np.pi / 2, 2) for _ in range(restarts)]
        best_x, best_v = None, np.inf
        for x0 in starts:
            res = minimize(score, x0, method="Nelder-Mead",
                           options={"xatol": 1e-9, "fatol": 1e-14, "maxiter": 2000})
            if res.fun < best_v:
                best_x, best_v = np.clip(res.x, 0, np.pi / 2), res.fun
    family = ProbeFamily4.from_angles(*best_x)
    report = optimal_time(probe_state_4(family), cfg, "family")
    improvement = baseline.delta_omega0 / report.delta_omega0 - 1
    flags = tuple(set(report.flags) | set(baseline.flags))
    return ProbeOptimization(family, report, baseline, float(improvement), flags)


def time_sweep(probe, cfg: RamseyConfig, times, scheme: str = "probe") -> list[dict]:
    """Rows ``{t, delta_omega0, scheme}`` for CSV output."""
    rows = []
    for t in times:
        r = uncertainty(probe, replace(cfg, t=float(t)), scheme)
        rows.append({"t": float(t), "delta_omega0": r.delta_omega0, "scheme": scheme})
    return rows
