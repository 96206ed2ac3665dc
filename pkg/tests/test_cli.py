import csv
import io
import json
import subprocess
import sys

import jsonschema
import numpy as np
import pytest

from multient.cli import REPORT_SCHEMA, main, run
from multient.core import ghz_state, w_state
from multient.formats import save_state


def invoke(*argv):
    out, err = io.StringIO(), io.StringIO()
    code, report = run(list(argv), stdout=out, stderr=err)
    return code, report, out.getvalue(), err.getvalue()


def invoke_json(*argv):
    code, _, out, err = invoke(*argv, "--json")
    assert code == 0, err
    data = json.loads(out)
    jsonschema.validate(data, REPORT_SCHEMA)
    return {r["name"]: r["value"] for r in data["results"]}, data


@pytest.fixture
def w_file(tmp_path):
    path = tmp_path / "w.json"
    save_state(w_state(3), path)
    return str(path)


@pytest.fixture
def ghz_file(tmp_path):
    path = tmp_path / "ghz.json"
    save_state(ghz_state(3), path)
    return str(path)


def test_classify_ghz_file(ghz_file):
    results, data = invoke_json("classify", ghz_file)
    assert results["slocc_class"] == "GHZ"
    assert results["tangle"] == pytest.approx(1.0, abs=1e-12)
    assert results["tensor_rank"]["exact"] == 2
    assert len(data["inputs"][0]["sha256"]) == 64
    assert data["settings"]["seed"] == 0


def test_measure_all_on_w_file(w_file):
    results, _ = invoke_json("measure", "--all", w_file)
    assert results["schmidt_measure"]["value"] == np.log2(3)
    assert results["global_entanglement"] == pytest.approx(8 / 9, abs=1e-12)
    assert results["geometric_measure"]["value"] == pytest.approx(np.sqrt(10) / 3, abs=1e-4)
    assert results["tangle"] == pytest.approx(0, abs=1e-12)
    assert results["localizable_entanglement[2,3]"] == pytest.approx(2 / 3, abs=1e-3)


def test_measure_selected_on_builtin():
    results, data = invoke_json("measure", "--builtin", "bell", "--measure", "entropy",
                                "--measure", "concurrence")
    assert results["entropy_of_entanglement[1-2]"] == pytest.approx(1.0)
    assert results["concurrence"] == pytest.approx(1.0)
    assert data["inputs"] == [{"builtin": "bell"}]


def test_relative_entropy_via_cli():
    results, data = invoke_json("measure", "--builtin", "bell", "--measure", "relative-entropy",
                                "--restarts", "1")
    assert results["relative_entropy_of_entanglement_ub"]["value"] == pytest.approx(1.0, abs=1e-2)
    assert data["settings"]["relative_entropy_restarts"] == 1


def test_splits_for_three_parties():
    results, _ = invoke_json("splits", "--n", "3")
    assert results["count"] == 5
    assert sorted(results["splits"]) == sorted(["1-2-3", "12-3", "1-23", "13-2", "123"])


def test_witness_command():
    results, data = invoke_json("witness", "--builtin", "w3", "--decompose")
    assert results["A_W"] == pytest.approx(-1 / 3, abs=1e-12)
    assert results["A_W_detects"] is True
    assert results["A_GHZ"] == pytest.approx(3 / 4, abs=1e-12)
    assert results["A_GHZ_detects"] is False
    assert results["A_GHZ_settings"] == 7
    assert "witness_verdicts_are_sufficient_conditions_only" in data["flags"]


def test_normal_form_command(ghz_file):
    results, _ = invoke_json("normal-form", ghz_file)
    assert set(results["acin_form"]) == {"lambdas", "phi", "unitaries"}
    assert results["reconstruction_fidelity"] == pytest.approx(1.0, abs=1e-10)
    results, _ = invoke_json("normal-form", ghz_file, "--split", "12-3")
    assert results["schmidt_rank"] == 2


def test_graph_and_stabilizer_commands(tmp_path):
    results, _ = invoke_json("graph", "--linear", "4")
    assert results["generators"] == ["XZII", "ZXZI", "IZXZ", "IIZX"]
    assert np.allclose(np.abs(np.array(results["amplitudes"])[:, 0] + 1j * np.array(results["amplitudes"])[:, 1]), 0.25)
    assert results["schmidt_rank_per_cut"]["12-34"] == 2
    assert results["schmidt_rank_per_cut"]["13-24"] == 4
    graph = tmp_path / "g.json"
    graph.write_text(json.dumps({"n_vertices": 3, "edges": [[1, 2], [1, 3]]}))
    results, _ = invoke_json("graph", str(graph))
    assert set(results["schmidt_rank_per_cut"].values()) == {2}
    saved = tmp_path / "ghz.json"
    results, _ = invoke_json("stabilizer", "ZZI", "IZZ", "XXX", "--save", str(saved))
    results, _ = invoke_json("classify", str(saved))
    assert results["slocc_class"] == "GHZ"


def test_metrology_command_with_csv(tmp_path):
    path = tmp_path / "sweep.csv"
    results, _ = invoke_json("metrology", "--probe", "ghz", "--sweep", "0.01", "0.1", "4",
                             "--csv", str(path))
    assert results["shot_noise_limit"]["delta_omega0"] == pytest.approx(5.0)
    assert results["ghz_limit"]["delta_omega0"] == pytest.approx(2.5)
    assert results["probe_uncertainty"]["delta_omega0"] == pytest.approx(2.5)
    rows = list(csv.DictReader(path.open()))
    assert list(rows[0]) == ["t", "delta_omega0", "scheme"]
    assert len(rows) == 4 and float(rows[0]["delta_omega0"]) == pytest.approx(2.5)


def test_metrology_optimization_is_deterministic():
    argv = ("metrology", "--gamma", "1", "--optimize", "--grid", "5", "--restarts", "1", "--seed", "9")
    a, _ = invoke_json(*argv)
    b, _ = invoke_json(*argv)
    assert a == b
    assert a["improvement"] > 0


def test_text_output_mentions_results():
    code, _, out, _ = invoke("classify", "--builtin", "w3")
    assert code == 0
    assert "slocc_class: W" in out and "settings:" in out


@pytest.mark.parametrize("argv", [
    ["frobnicate"],
    [],
    ["classify"],
    ["classify", "/nonexistent/state.json"],
    ["measure", "--builtin", "ghz3", "--split", "1-2-3"],
    ["stabilizer", "XI", "ZI"],
    ["metrology", "--t", "2", "--T", "1"],
])
def test_input_errors_exit_with_one(argv):
    code, report, _, err = invoke(*argv)
    assert code == 1 and report is None
    assert "error" in err


def test_bad_state_file_exits_with_one(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"n_qubits": 1, "kind": "pure", "amplitudes": [[1, 0], [1, 0]]}))
    code, _, _, err = invoke("classify", str(path))
    assert code == 1 and "norm" in err


def test_non_convergence_exits_with_two():
    code, report, _, err = invoke("normal-form", "--builtin", "ghz3", "--tol", "-1")
    assert code == 2 and report is None
    assert "non-convergence" in err


def test_help_and_version_exit_cleanly(capsys):
    assert main(["--version"]) == 0
    assert main(["splits", "--help"]) == 0


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "multient", "splits", "--n", "2", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["results"][0] == {"name": "count", "value": 2}
