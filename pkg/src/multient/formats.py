"""File formats: state and graph JSON, report serialization, CSV sweeps.

State files::

    {"n_qubits": 2, "kind": "pure", "amplitudes": [[re, im], ...]}
    {"n_qubits": 1, "kind": "mixed", "matrix": [[[re, im], [re, im]], ...]}

Graph files use 1-based vertices::

    {"n_vertices": 4, "edges": [[1, 2], [2, 3], [3, 4]]}
"""
from __future__ import annotations

import csv
import enum
import hashlib
import io
import json
from pathlib import Path
from typing import Union

import numpy as np

from .core import DensityOperator, EntanglementError, PureState
from .stabilizer import Graph

FILE_TOL = 1e-6


def _complex_array(data, what: str, ndim: int) -> np.ndarray:
    try:
        a = np.asarray(data, dtype=float)
    except (TypeError, ValueError) as exc:
        raise EntanglementError(f"{what} must be numeric [re, im] pairs") from exc
    if a.ndim != ndim + 1 or a.shape[-1] != 2:
        raise EntanglementError(f"{what} entries must be [re, im] pairs")
    return a[..., 0] + 1j * a[..., 1]


def _pairs(a: np.ndarray) -> list:
    a = np.asarray(a, dtype=complex)
    return np.stack([a.real, a.imag], axis=-1).tolist()


def state_from_dict(obj: dict) -> Union[PureState, DensityOperator]:
    """Parse a state object, renormalizing deviations up to ``FILE_TOL``."""
    if not isinstance(obj, dict):
        raise EntanglementError("state file must contain a JSON object")
    try:
        n = int(obj["n_qubits"])
        kind = obj["kind"]
    except KeyError as exc:
        raise EntanglementError(f"state file is missing field {exc.args[0]!r}") from exc
    if n < 1:
        raise EntanglementError("n_qubits must be positive")
    d = 2**n
    if kind == "pure":
        if "amplitudes" not in obj:
            raise EntanglementError("pure state file needs 'amplitudes'")
        v = _complex_array(obj["amplitudes"], "amplitudes", 1)
        if v.shape != (d,):
            raise EntanglementError(f"expected {d} amplitudes for {n} qubits, got {v.shape[0]}")
        norm = np.linalg.norm(v)
        if abs(norm - 1) > FILE_TOL:
            raise EntanglementError(f"amplitudes have norm {norm:.9g}, not 1 within {FILE_TOL}")
        return PureState(n, v / norm)
    if kind == "mixed":
        if "matrix" not in obj:
            raise EntanglementError("mixed state file needs 'matrix'")
        m = _complex_array(obj["matrix"], "matrix", 2)
        if m.shape != (d, d):
            raise EntanglementError(f"expected a {d}x{d} matrix for {n} qubits, got {m.shape}")
        if np.max(np.abs(m - m.conj().T)) > FILE_TOL:
            raise EntanglementError("matrix is not Hermitian within file tolerance")
        m = (m + m.conj().T) / 2
        tr = np.trace(m).real
        if abs(tr - 1) > FILE_TOL:
            raise EntanglementError(f"matrix has trace {tr:.9g}, not 1 within {FILE_TOL}")
        return DensityOperator(n, m / tr)
    raise EntanglementError(f"unknown state kind {kind!r}; expected 'pure' or 'mixed'")


def state_to_dict(state) -> dict:
    if isinstance(state, PureState):
        return {"n_qubits": state.n_qubits, "kind": "pure", "amplitudes": _pairs(state.amplitudes)}
    if isinstance(state, DensityOperator):
        return {"n_qubits": state.n_qubits, "kind": "mixed", "matrix": _pairs(state.matrix)}
    raise TypeError(f"cannot serialize {type(state).__name__}")


def graph_from_dict(obj: dict) -> Graph:
    if not isinstance(obj, dict) or "n_vertices" not in obj:
        raise EntanglementError("graph file needs 'n_vertices'")
    edges = obj.get("edges", [])
    if any(not isinstance(e, (list, tuple)) or len(e) != 2 for e in edges):
        raise EntanglementError("graph edges must be [a, b] pairs")
    return Graph(int(obj["n_vertices"]), frozenset(tuple(int(v) for v in e) for e in edges))


def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise EntanglementError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise EntanglementError(f"{path} is not valid JSON: {exc}") from exc


def load_state(path):
    return state_from_dict(read_json(path))


def load_graph(path) -> Graph:
    return graph_from_dict(read_json(path))


def save_state(state, path) -> None:
    Path(path).write_text(json.dumps(state_to_dict(state)), encoding="utf-8")


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def to_jsonable(obj):
    """Recursively convert numpy scalars/arrays, enums and complex numbers."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, enum.Enum):
        return obj.value
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        return [float(obj.real), float(obj.imag)]
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        obj = float(obj)
    if isinstance(obj, float) and not np.isfinite(obj):
        # JSON has no infinities; keep them readable and re-parseable.
        return "inf" if obj > 0 else ("-inf" if obj < 0 else "nan")
    return obj


def dumps(obj, indent=2) -> str:
    return json.dumps(to_jsonable(obj), indent=indent, sort_keys=False)


SWEEP_COLUMNS = ("t", "delta_omega0", "scheme")


def sweep_csv(rows, columns=SWEEP_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({c: r[c] for c in columns})
    return buf.getvalue()
