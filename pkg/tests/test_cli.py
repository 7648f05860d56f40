import io
import json
import subprocess
import sys

import pytest

from toruspenny.cli import run


def call(capsys, *argv, stdin=None, monkeypatch=None):
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def emitted(capsys, name):
    code, out, _ = call(capsys, "catalog", "emit", name)
    assert code == 0
    return out


def test_verify_k33_exact(capsys, monkeypatch):
    cfg = emitted(capsys, "k33")
    code, out, _ = call(capsys, "verify", "--expect", "k33", "--exact", stdin=cfg, monkeypatch=monkeypatch)
    rep = json.loads(out)
    assert code == 0
    assert rep["schema_version"] == 1
    assert rep["passed"] is True and rep["diameter_squared"] == "25/162"


def test_verify_k5_round_trip_from_file(capsys, tmp_path):
    path = tmp_path / "k5.json"
    path.write_text(emitted(capsys, "k5"))
    code, out, _ = call(capsys, "verify", str(path), "--expect", "k5", "--exact")
    assert code == 0 and json.loads(out)["diameter_squared"] == "1/5"


def test_verify_failure_is_exit_1(capsys, tmp_path):
    path = tmp_path / "k5.json"
    path.write_text(emitted(capsys, "k5"))
    code, out, err = call(capsys, "verify", str(path), "--expect", "k33")
    assert code == 1
    assert json.loads(out)["passed"] is False
    assert "vertex counts" in err


def test_verify_exact_on_float_config_is_usage_error(capsys, tmp_path):
    path = tmp_path / "oct.json"
    path.write_text(emitted(capsys, "octahedron"))
    code, _, err = call(capsys, "verify", str(path), "--expect", "octahedron", "--exact")
    assert code == 2 and "rational" in err


def test_analyze(capsys, tmp_path):
    path = tmp_path / "k33.json"
    path.write_text(emitted(capsys, "k33"))
    code, out, _ = call(capsys, "analyze", str(path))
    rep = json.loads(out)
    assert code == 0
    assert rep["named_match"] == "K33" and rep["bipartite"] == [[1, 3, 5], [2, 4, 6]]


def test_bound(capsys):
    code, out, _ = call(capsys, "bound", "--n", "11")
    assert code == 0 and json.loads(out)["bound"] == 21


def test_bound_invalid(capsys):
    code, _, _ = call(capsys, "bound", "--n", "0")
    assert code == 2


def test_planar_k5(capsys, tmp_path):
    path = tmp_path / "g.json"
    path.write_text(json.dumps({"n": 5, "edges": [[i, j] for i in range(5) for j in range(i + 1, 5)]}))
    code, out, _ = call(capsys, "planar", str(path))
    rep = json.loads(out)
    assert code == 0 and rep["planar"] is False and rep["witness_kind"] == "K5"


def test_catalog_list(capsys):
    code, out, _ = call(capsys, "catalog", "list")
    names = {e["name"] for e in json.loads(out)["entries"]}
    assert code == 0 and {"k5", "k33", "octahedron", "k7"} <= names


@pytest.mark.parametrize("argv", [
    ["frobnicate"], [], ["optimize"], ["optimize", "--n", "5", "--bogus"],
    ["catalog", "emit"], ["render", "--tiling", "3"],
])
def test_usage_errors(capsys, argv):
    code, _, err = call(capsys, *argv)
    assert code == 2 and err


def test_unknown_catalog_entry(capsys):
    code, _, err = call(capsys, "catalog", "emit", "k99")
    assert code == 2 and "unknown catalog entry" in err


def test_missing_file(capsys, tmp_path):
    code, _, err = call(capsys, "analyze", str(tmp_path / "nope.json"))
    assert code == 2 and "cannot read" in err


def test_optimize_small(capsys):
    code, out, _ = call(capsys, "optimize", "--n", "5", "--restarts", "3", "--seed", "1")
    rep = json.loads(out)
    assert code == 0 and rep["n"] == 5 and abs(rep["diameter"] - 5 ** -0.5) < 1e-6


def test_optimize_degenerate(capsys):
    code, _, _ = call(capsys, "optimize", "--n", "1")
    assert code == 2


def test_survey_small(capsys):
    code, out, err = call(capsys, "survey", "--target", "k5", "--trials", "4", "--seed", "0")
    rep = json.loads(out)
    assert code == 0 and rep["trials"] == 4 and len(rep["classes"]) == 1
    assert "failures" in err


def test_render_to_file(capsys, tmp_path):
    out_svg = tmp_path / "fig.svg"
    code, out, _ = call(capsys, "render", "--catalog", "k5", "--tiling", "3", "--out", str(out_svg))
    assert code == 0 and json.loads(out)["circles"] == 45
    assert out_svg.read_text().count("<circle") == 45


def test_render_input_drawing_to_stdout(capsys, tmp_path):
    path = tmp_path / "k7.json"
    path.write_text(emitted(capsys, "k7"))
    code, out, _ = call(capsys, "render", "--input", str(path))
    assert code == 0 and out.startswith("<?xml") and out.count('<g class="edge"') == 21


def test_check_drawing(capsys, tmp_path):
    path = tmp_path / "k6.json"
    path.write_text(emitted(capsys, "k6-3"))
    code, out, _ = call(capsys, "check-drawing", str(path))
    assert code == 0 and json.loads(out)["passed"] is True


def test_console_pipeline():
    emit = subprocess.run([sys.executable, "-m", "toruspenny.cli", "catalog", "emit", "k5"],
                          capture_output=True, text=True, check=True)
    ver = subprocess.run([sys.executable, "-m", "toruspenny.cli", "verify", "--expect", "k5", "--exact"],
                         input=emit.stdout, capture_output=True, text=True)
    assert ver.returncode == 0
    assert json.loads(ver.stdout)["passed"] is True
