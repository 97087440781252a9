import csv
import io
import json

import numpy as np
import pytest

from brownian_replica.cli import run
from brownian_replica.observable import dense_contraction, random_ops
from brownian_replica.evolution import assemble_U


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def _write_ops(path, ops):
    path.write_text(json.dumps({"ops": [[[[z.real, z.imag] for z in row] for row in o] for o in ops]}))


def test_enumerate_text(capsys):
    code, out, _ = _run(capsys, "enumerate", "--n", "3")
    assert code == 0
    assert out.split("\n")[:5] == ["720", "p=0: 36", "p=1: 324", "p=2: 324", "p=3: 36"]


def test_categories_json(capsys):
    code, out, _ = _run(capsys, "categories", "--n", "2", "--members")
    data = json.loads(out)
    assert code == 0 and data["count"] == 8 and data["total_members"] == 24
    assert data["categories"][0]["members"] == ["0:[];s1:[1,2];s2:[1,2]"]


def test_matrix_symbolic(capsys):
    code, out, _ = _run(capsys, "matrix", "--n", "2")
    data = json.loads(out)
    assert data["matrix"][0][2] == "-2*J/D"
    assert data["matrix"][4][4] == "w + 2*J"


def test_spectrum_symbolic(capsys):
    code, out, _ = _run(capsys, "spectrum", "--n", "2")
    data = json.loads(out)
    assert sum(e["multiplicity"] for e in data["eigenvalues"]) == 8


def test_evolve_csv(capsys):
    code, out, _ = _run(capsys, "evolve", "--n", "2", "--D", "4", "--times", "0:1:3")
    rows = list(csv.reader(io.StringIO(out.strip())))
    assert code == 0 and len(rows) == 4
    assert rows[0][:3] == ["t", "re f_1 F_{0,I}", "im f_1 F_{0,I}"]
    assert len(rows[0]) == 17
    assert rows[1][1] == "1.0"


def test_correlate_matches_dense(tmp_path, capsys):
    rng = np.random.default_rng(5)
    ops = random_ops(2, 3, rng)
    _write_ops(tmp_path / "ops.json", ops)
    code, out, _ = _run(capsys, "correlate", "--n", "2", "--D", "3", "--ops", str(tmp_path / "ops.json"), "--t", "0.5")
    value = complex(*json.loads(out)["value"])
    assert code == 0
    assert abs(value - dense_contraction(assemble_U(2, 3, 1.0, None, 0.5), ops)) < 1e-9


def test_correlate_multi(tmp_path, capsys):
    rng = np.random.default_rng(6)
    _write_ops(tmp_path / "ops.json", random_ops(3, 2, rng))
    code, out, _ = _run(capsys, "correlate-multi", "--D", "2", "--ops", str(tmp_path / "ops.json"), "--times", "0.3,0.7,1.1")
    assert code == 0 and len(json.loads(out)["value"]) == 2
    code, _, err = _run(capsys, "correlate-multi", "--D", "2", "--ops", str(tmp_path / "ops.json"), "--times", "0.7,0.3,1.1")
    assert code == 2 and "ordered" in err


@pytest.mark.parametrize("n,D", [(1, 3), (2, 3), (3, 2)])
def test_verify_passes(capsys, n, D):
    code, out, _ = _run(capsys, "verify", "--n", str(n), "--D", str(D))
    data = json.loads(out)
    assert code == 0 and data["passed"]
    assert [r["suite"] for r in data["results"]] == ["counts", "matrix", "spectrum", "evolution", "observables", "symmetry"]


def test_verify_failure_exit_code(capsys):
    code, out, _ = _run(capsys, "verify", "--n", "2", "--D", "3", "--suite", "evolution", "--tol", "0")
    assert code == 1 and not json.loads(out)["passed"]


def test_deterministic_output(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for path in (a, b):
        assert run(["verify", "--n", "2", "--D", "2", "--seed", "3", "--output", str(path)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_usage_errors(tmp_path, capsys):
    assert _run(capsys, "enumerate")[0] == 2
    assert _run(capsys, "enumerate", "--n", "0")[0] == 2
    assert _run(capsys, "evolve", "--n", "2", "--D", "3", "--times", "bad")[0] == 2
    assert _run(capsys, "verify", "--n", "4", "--D", "4")[0] == 2
    (tmp_path / "e.json").write_text(json.dumps({"E": [0.0]}))
    assert _run(capsys, "evolve", "--n", "2", "--D", "3", "--times", "0,1", "--spectrum", str(tmp_path / "e.json"))[0] == 2
    assert _run(capsys, "correlate", "--n", "2", "--D", "3", "--ops", str(tmp_path / "missing.json"), "--t", "1")[0] == 2


def test_threads_flag(capsys):
    assert _run(capsys, "enumerate", "--n", "2", "--threads", "1")[0] == 0
