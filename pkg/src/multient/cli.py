"""Command-line front end.

Every subcommand builds a :class:`Report` and prints it as text, or as JSON
with ``--json``. Exit codes: 0 success, 1 input or usage error, 2 numerical
non-convergence.
"""
from __future__ import annotations

import argparse
import itertools
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .classification import (
    TANGLE_THRESHOLD,
    classify_slocc_3q,
    enumerate_splits,
    separability_report,
    tensor_rank_bounds,
)
from .core import (
    RANK_RTOL,
    DensityOperator,
    EntanglementError,
    NonConvergenceError,
    PureState,
    Split,
    all_bipartitions,
    bell_state,
    ghz_state,
    plus_state,
    w_state,
)
from .formats import dumps, file_digest, load_graph, load_state, save_state, sweep_csv, to_jsonable
from .measures import (
    concurrence_2q,
    entropy_of_entanglement,
    geometric_measure,
    global_entanglement,
    localizable_entanglement,
    relative_entropy_of_entanglement_ub,
    schmidt_measure,
    tangle,
)
from .metrology import (
    ProbeFamily4,
    RamseyConfig,
    ghz_limit,
    optimize_probe,
    probe_state_4,
    shot_noise_limit,
    time_sweep,
    uncertainty,
)
from .normal_forms import RECONSTRUCTION_TOL, acin_normal_form, schmidt_decompose
from .stabilizer import (
    Graph,
    StabilizerGroup,
    graph_generators,
    graph_state,
    schmidt_rank_across_cut,
    stabilizer_state,
)
from .witnesses import evaluate, ghz_witness, pauli_decompose, w_witness

BUILTINS = {
    "ghz3": lambda: ghz_state(3),
    "w3": lambda: w_state(3),
    "cluster4": lambda: graph_state(Graph.linear(4)),
    "bell": lambda: bell_state("phi+"),
}

PPT_TOL = 1e-10
DEFAULT_RESTARTS = {"geometric": 50, "tensor_rank": 20, "relative_entropy": 4, "probe": 4}

REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["command", "inputs", "results", "flags", "settings"],
    "properties": {
        "command": {"type": "string"},
        "inputs": {
            "type": "array",
            "items": {
                "type": "object",
                "anyOf": [
                    {"required": ["path", "sha256"]},
                    {"required": ["builtin"]},
                    {"required": ["inline"]},
                ],
            },
        },
        "results": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["name", "value"],
                "properties": {"name": {"type": "string"}},
            },
        },
        "flags": {"type": "array", "items": {"type": "string"}},
        "settings": {"type": "object", "required": ["seed"]},
    },
}


class UsageError(Exception):
    """Bad arguments or unreadable input; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{message}\n{self.format_usage().rstrip()}")


@dataclass
class Report:
    command: str
    inputs: list = field(default_factory=list)
    results: list = field(default_factory=list)
    flags: list = field(default_factory=list)
    settings: dict = field(default_factory=dict)

    def add(self, name: str, value) -> None:
        self.results.append({"name": name, "value": to_jsonable(value)})

    def flag(self, *flags) -> None:
        for f in flags:
            if f not in self.flags:
                self.flags.append(f)

    def get(self, name: str):
        for r in self.results:
            if r["name"] == name:
                return r["value"]
        raise KeyError(name)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "results": self.results,
            "flags": self.flags,
            "settings": to_jsonable(self.settings),
        }

    def render_text(self) -> str:
        lines = [f"command: {self.command}"]
        for inp in self.inputs:
            if "path" in inp:
                lines.append(f"input: {inp['path']} (sha256 {inp['sha256'][:16]}...)")
            else:
                key = next(iter(inp))
                lines.append(f"input: {key} {inp[key]}")
        for r in self.results:
            v = r["value"]
            text = json.dumps(v) if isinstance(v, (dict, list)) else str(v)
            lines.append(f"{r['name']}: {text}")
        lines.append("flags: " + (", ".join(self.flags) if self.flags else "none"))
        lines.append("settings: " + json.dumps(to_jsonable(self.settings), sort_keys=True))
        return "\n".join(lines)


# Argument parsing -------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.add_argument("--seed", type=int, default=0, help="seed for every randomized optimizer")
    p.add_argument("--tol", type=float, default=None,
                   help="decision tolerance (rank, PPT or reconstruction, per command)")
    p.add_argument("--restarts", type=int, default=None, help="optimizer restarts")
    p.add_argument("--builtin", choices=sorted(BUILTINS), help="use a named built-in state")
    return p


def _party_list(text: str) -> tuple:
    try:
        return tuple(int(p) for p in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected party numbers, got {text!r}") from exc


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="multient", description="Multi-qubit entanglement toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("classify", parents=[common],
                       help="SLOCC class, tensor-rank bounds and separability report")
    p.add_argument("input", nargs="?", help="state JSON file")

    p = sub.add_parser("measure", parents=[common], help="entanglement measures")
    p.add_argument("input", nargs="?", help="state JSON file")
    p.add_argument("--all", action="store_true", help="every measure applicable to the input")
    p.add_argument("--measure", action="append", default=[],
                   choices=["entropy", "schmidt", "global", "geometric", "tangle",
                            "concurrence", "relative-entropy", "localizable"])
    p.add_argument("--split", help="bipartition for the entropy of entanglement, e.g. 1-23")
    p.add_argument("--pair", type=_party_list, help="pair for localizable entanglement, e.g. 2,3")
    p.add_argument("--grid", type=int, default=9, help="Bloch-angle grid resolution")

    p = sub.add_parser("witness", parents=[common], help="GHZ and W witnesses")
    p.add_argument("input", nargs="?", help="three-qubit state JSON file")
    p.add_argument("--kind", choices=["ghz", "w", "all"], default="all")
    p.add_argument("--decompose", action="store_true", help="print the Pauli expansion")

    p = sub.add_parser("normal-form", parents=[common],
                       help="three-qubit normal form or bipartite Schmidt form")
    p.add_argument("input", nargs="?", help="state JSON file")
    p.add_argument("--split", help="bipartition for a Schmidt decomposition, e.g. 1-23")

    p = sub.add_parser("graph", parents=[common], help="graph state from a graph")
    p.add_argument("input", nargs="?", help="graph JSON file")
    shape = p.add_mutually_exclusive_group()
    for name in ("linear", "star", "complete", "empty"):
        shape.add_argument(f"--{name}", type=int, metavar="N", help=f"{name} graph on N vertices")
    p.add_argument("--save", help="write the graph state to this JSON file")

    p = sub.add_parser("stabilizer", parents=[common], help="state stabilized by Pauli generators")
    p.add_argument("generators", nargs="+", help='generators such as "XXX" or "-ZZI"')
    p.add_argument("--save", help="write the state to this JSON file")

    p = sub.add_parser("metrology", parents=[common], help="Ramsey frequency uncertainty")
    p.add_argument("--n", type=int, default=4, help="number of ions")
    p.add_argument("--t", type=float, default=0.01, help="interrogation time")
    p.add_argument("--T", type=float, default=1.0, help="total time")
    p.add_argument("--gamma", type=float, default=0.0, help="dephasing rate per qubit")
    p.add_argument("--omega0", type=float, default=0.0)
    p.add_argument("--optimize", action="store_true",
                   help="optimize the four-ion probe family and interrogation time")
    p.add_argument("--grid", type=int, default=13, help="angle grid for --optimize")
    p.add_argument("--sweep", nargs=3, type=float, metavar=("TMIN", "TMAX", "COUNT"),
                   help="uncertainty at COUNT times between TMIN and TMAX")
    p.add_argument("--probe", choices=["uncorrelated", "ghz", "family"], default="uncorrelated")
    p.add_argument("--lambdas", nargs=3, type=float, metavar=("L0", "L1", "L2"),
                   help="family weights for --probe family")
    p.add_argument("--csv", help="write the sweep as CSV to this path")

    p = sub.add_parser("splits", parents=[common], help="all splits of N parties")
    p.add_argument("--n", type=int, required=True)
    return parser


# Helpers ----------------------------------------------------------------------


def _load(args, report: Report):
    if args.builtin and args.input:
        raise UsageError("give either a state file or --builtin, not both")
    if args.builtin:
        report.inputs.append({"builtin": args.builtin})
        return BUILTINS[args.builtin]()
    if args.input:
        state = load_state(args.input)
        report.inputs.append({"path": args.input, "sha256": file_digest(args.input)})
        return state
    raise UsageError("need a state file or --builtin NAME")


def _restarts(args, key: str) -> int:
    return DEFAULT_RESTARTS[key] if args.restarts is None else args.restarts


def _split(text: str, n: int) -> Split:
    try:
        s = Split.parse(text)
    except (ValueError, EntanglementError) as exc:
        raise UsageError(f"cannot parse split {text!r}") from exc
    if s.n_parties != n or not s.is_bipartition():
        raise UsageError(f"{text!r} is not a bipartition of {n} parties")
    return s


# Commands ---------------------------------------------------------------------


def cmd_classify(args, report: Report) -> None:
    state = _load(args, report)
    rtol = RANK_RTOL if args.tol is None else args.tol
    ppt_tol = PPT_TOL if args.tol is None else args.tol
    report.settings.update(rank_rtol=rtol, ppt_tol=ppt_tol, tangle_threshold=TANGLE_THRESHOLD)
    n = state.n_qubits
    if isinstance(state, PureState):
        if n == 3:
            c = classify_slocc_3q(state, rtol=rtol)
            report.add("slocc_class", c.label.value)
            report.add("local_ranks", list(c.local_ranks))
            report.add("tangle", c.tangle)
            report.flag(*c.flags)
        if n <= 6:
            restarts = _restarts(args, "tensor_rank")
            report.settings["tensor_rank_restarts"] = restarts
            b = tensor_rank_bounds(state, restarts=restarts, seed=args.seed, rtol=rtol)
            report.add("tensor_rank", b.to_dict())
            report.flag(*b.flags)
    if n <= 4:
        sep = separability_report(state if isinstance(state, DensityOperator)
                                  else state.to_density(), ppt_tol=ppt_tol)
        report.add("separability", sep.to_dict())
    elif isinstance(state, DensityOperator):
        raise UsageError("separability reports are limited to N <= 4")


_PURE_ALL = ("entropy", "schmidt", "global", "geometric", "tangle", "localizable")
_MIXED_ALL = ("concurrence", "relative-entropy")


def cmd_measure(args, report: Report) -> None:
    state = _load(args, report)
    n = state.n_qubits
    pure = isinstance(state, PureState)
    wanted = list(dict.fromkeys(args.measure))
    if args.all or not wanted:
        if pure:
            wanted = [m for m in _PURE_ALL
                      if not (m == "tangle" and n != 3)
                      and not (m == "localizable" and not 3 <= n <= 4)
                      and not (m == "schmidt" and n > 6)
                      and not (m == "geometric" and n > 6)]
        else:
            wanted = [m for m in _MIXED_ALL
                      if not (m == "concurrence" and n != 2)
                      and not (m == "relative-entropy" and n > 3)]
    rtol = RANK_RTOL if args.tol is None else args.tol
    report.settings.update(rank_rtol=rtol)
    pure_only = {"entropy", "schmidt", "global", "geometric", "tangle", "localizable"}
    for m in wanted:
        if m in pure_only and not pure:
            raise UsageError(f"measure {m!r} needs a pure state")
        if m == "entropy":
            splits = [_split(args.split, n)] if args.split else all_bipartitions(n)
            for s in splits:
                report.add(f"entropy_of_entanglement[{s}]", entropy_of_entanglement(state, s))
        elif m == "schmidt":
            restarts = _restarts(args, "tensor_rank")
            report.settings["tensor_rank_restarts"] = restarts
            r = schmidt_measure(state, seed=args.seed, restarts=restarts, rtol=rtol)
            report.add("schmidt_measure", r)
            report.flag(*r.flags)
        elif m == "global":
            report.add("global_entanglement", global_entanglement(state))
        elif m == "geometric":
            restarts = _restarts(args, "geometric")
            report.settings["geometric_restarts"] = restarts
            r = geometric_measure(state, restarts=restarts, seed=args.seed)
            report.add("geometric_measure", r)
            report.flag(*r.flags)
        elif m == "tangle":
            report.add("tangle", tangle(state))
        elif m == "concurrence":
            if n != 2:
                raise UsageError("concurrence needs a two-qubit state")
            report.add("concurrence", concurrence_2q(state))
        elif m == "relative-entropy":
            restarts = _restarts(args, "relative_entropy")
            report.settings["relative_entropy_restarts"] = restarts
            r = relative_entropy_of_entanglement_ub(state, restarts=restarts, seed=args.seed)
            report.add("relative_entropy_of_entanglement_ub", r)
            report.flag(*r.flags)
        elif m == "localizable":
            report.settings["grid_resolution"] = args.grid
            pairs = [args.pair] if args.pair else list(itertools.combinations(range(1, n + 1), 2))
            for pair in pairs:
                v = localizable_entanglement(state, pair, grid_resolution=args.grid)
                report.add(f"localizable_entanglement[{pair[0]},{pair[1]}]", v)


def cmd_witness(args, report: Report) -> None:
    kinds = ["ghz", "w"] if args.kind == "all" else [args.kind]
    witnesses = {"ghz": ("A_GHZ", ghz_witness()), "w": ("A_W", w_witness())}
    state = _load(args, report) if (args.input or args.builtin) else None
    if state is None and not args.decompose:
        raise UsageError("need a state to evaluate, or --decompose")
    if state is not None and state.n_qubits != 3:
        raise UsageError("the GHZ and W witnesses act on three qubits")
    for k in kinds:
        name, w = witnesses[k]
        if state is not None:
            v = evaluate(w, state)
            report.add(name, v)
            report.add(f"{name}_detects", v < 0)
        if args.decompose:
            d = pauli_decompose(w)
            report.add(f"{name}_pauli_terms", d.to_list())
            report.add(f"{name}_settings", d.n_settings)
    report.flag("witness_verdicts_are_sufficient_conditions_only")


def cmd_normal_form(args, report: Report) -> None:
    state = _load(args, report)
    if not isinstance(state, PureState):
        raise UsageError("normal forms need a pure state")
    n = state.n_qubits
    if n == 3 and not args.split:
        tol = RECONSTRUCTION_TOL if args.tol is None else args.tol
        report.settings["reconstruction_tol"] = tol
        form = acin_normal_form(state, tol=tol)
        report.add("acin_form", form.to_dict())
        report.add("reconstruction_fidelity", form.reconstruction_fidelity(state))
        return
    if n < 2:
        raise UsageError("a Schmidt decomposition needs at least two qubits")
    split = _split(args.split, n) if args.split else Split.bipartition([1], n)
    f = schmidt_decompose(state, split)
    report.add("split", str(split))
    report.add("schmidt_coefficients", [float(c) for c in f.coefficients])
    report.add("schmidt_rank", f.schmidt_rank)
    if f.theta is not None:
        report.add("theta", f.theta)


def _graph(args, report: Report) -> Graph:
    shapes = {"linear": Graph.linear, "star": Graph.star, "complete": Graph.complete,
              "empty": lambda k: Graph(k, frozenset())}
    chosen = [(k, getattr(args, k)) for k in shapes if getattr(args, k) is not None]
    sources = len(chosen) + bool(args.input) + bool(args.builtin)
    if sources != 1:
        raise UsageError("give exactly one of a graph file, --linear/--star/--complete/--empty N, "
                         "or --builtin cluster4")
    if args.builtin:
        if args.builtin != "cluster4":
            raise UsageError("the only built-in graph is cluster4")
        report.inputs.append({"builtin": "cluster4"})
        return Graph.linear(4)
    if args.input:
        g = load_graph(args.input)
        report.inputs.append({"path": args.input, "sha256": file_digest(args.input)})
        return g
    kind, k = chosen[0]
    if k < 1:
        raise UsageError("a graph needs at least one vertex")
    report.inputs.append({"inline": f"{kind}:{k}"})
    return shapes[kind](k)


def _stabilizer_results(state: PureState, group: StabilizerGroup, args, report: Report):
    rtol = RANK_RTOL if args.tol is None else args.tol
    report.settings["rank_rtol"] = rtol
    report.add("generators", [str(g) for g in group.generators])
    report.add("amplitudes", state.amplitudes)
    n = state.n_qubits
    if n >= 2:
        ranks = {str(s): schmidt_rank_across_cut(state, s, rtol) for s in all_bipartitions(n)}
        report.add("schmidt_rank_per_cut", ranks)
    if args.save:
        save_state(state, args.save)
        report.add("saved", args.save)


def cmd_graph(args, report: Report) -> None:
    g = _graph(args, report)
    if g.n_vertices > 10:
        raise UsageError("dense graph states are limited to 10 vertices")
    report.add("graph", g.to_dict())
    _stabilizer_results(graph_state(g), graph_generators(g), args, report)


def cmd_stabilizer(args, report: Report) -> None:
    if args.builtin:
        raise UsageError("stabilizer takes generators, not a built-in state")
    group = StabilizerGroup.from_labels(args.generators)
    if group.n_qubits > 10:
        raise UsageError("dense stabilizer states are limited to 10 qubits")
    report.inputs.append({"inline": " ".join(args.generators)})
    _stabilizer_results(stabilizer_state(group), group, args, report)


def _probe(args):
    if args.probe == "ghz":
        return ghz_state(args.n)
    if args.probe == "family":
        if args.n != 4:
            raise UsageError("the probe family is defined for four ions")
        if not args.lambdas:
            raise UsageError("--probe family needs --lambdas L0 L1 L2")
        return probe_state_4(ProbeFamily4(*args.lambdas))
    return plus_state(args.n)


def cmd_metrology(args, report: Report) -> None:
    cfg = RamseyConfig(omega0=args.omega0, t=args.t, T=args.T, gamma=args.gamma, n=args.n)
    report.inputs.append({"inline": f"n={cfg.n} t={cfg.t} T={cfg.T} gamma={cfg.gamma}"})
    report.add("shot_noise_limit", shot_noise_limit(cfg))
    report.add("ghz_limit", ghz_limit(cfg))
    report.add("probe_uncertainty", uncertainty(_probe(args), cfg, args.probe))
    if args.optimize:
        if args.n != 4:
            raise UsageError("--optimize needs --n 4")
        restarts = _restarts(args, "probe")
        report.settings.update(probe_restarts=restarts, probe_grid=args.grid)
        opt = optimize_probe(cfg, grid=args.grid, restarts=restarts, seed=args.seed)
        report.add("optimized_probe", opt)
        report.add("improvement", opt.improvement)
        report.flag(*opt.flags)
        report.flag("model:independent_dephasing+quantum_fisher_information")
    if args.sweep:
        tmin, tmax, count = args.sweep
        if count < 1 or count != int(count):
            raise UsageError("COUNT must be a positive integer")
        times = np.linspace(tmin, tmax, int(count))
        rows = time_sweep(_probe(args), cfg, times, args.probe)
        report.add("sweep", rows)
        if args.csv:
            Path(args.csv).write_text(sweep_csv(rows), encoding="utf-8")
            report.add("csv", args.csv)


def cmd_splits(args, report: Report) -> None:
    report.inputs.append({"inline": f"n={args.n}"})
    splits = enumerate_splits(args.n)
    report.add("count", len(splits))
    report.add("splits", [str(s) for s in splits])


COMMANDS = {
    "classify": cmd_classify,
    "measure": cmd_measure,
    "witness": cmd_witness,
    "normal-form": cmd_normal_form,
    "graph": cmd_graph,
    "stabilizer": cmd_stabilizer,
    "metrology": cmd_metrology,
    "splits": cmd_splits,
}


def run(argv=None, stdout=None, stderr=None):
    """Execute one command; returns ``(exit_code, report_or_None)``."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"multient: error: {exc}", file=stderr)
        return 1, None
    except SystemExit as exc:  # --help and --version
        return int(exc.code or 0), None
    report = Report(args.command, settings={"seed": args.seed, "tol": args.tol,
                                            "restarts": args.restarts})
    try:
        COMMANDS[args.command](args, report)
    except NonConvergenceError as exc:
        print(f"multient: non-convergence: {exc}", file=stderr)
        return 2, None
    except (UsageError, EntanglementError, OSError) as exc:
        print(f"multient: error: {exc}", file=stderr)
        return 1, None
    print(dumps(report) if args.json else report.render_text(), file=stdout)
    return 0, report


def main(argv=None) -> int:
    return run(argv)[0]
