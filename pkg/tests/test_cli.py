import json
import subprocess
import sys

import numpy as np
import pytest

from mmcantor.cli import main
from mmcantor.clone_structure import bundled, structure_to_dict
from mmcantor.spectral import SpectralMatrix, frobenius


def run(capsys, *argv):
    status = main(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_dim_middle_third(capsys):
    status, out, _ = run(capsys, "dim", "middle_third")
    assert status == 0
    assert out.startswith("d* = 0.6309297535")
    assert "bracket" in out


def test_dim_curve_csv(capsys):
    status, out, _ = run(capsys, "dim", "figure_matrix", "--curve", "0:1:5")
    lines = out.strip().splitlines()
    assert status == 0 and lines[0] == "d,lambda" and len(lines) == 6
    assert float(lines[1].split(",")[1]) == pytest.approx((3 + 5 ** 0.5) / 2, abs=1e-12)


def test_validate_bad_file(capsys, tmp_path):
    bad = structure_to_dict(bundled("figure_matrix"))
    bad["clones"] = [c for c in bad["clones"] if c["container"] == 2 or c["id"] == 1]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(bad))
    status, out, _ = run(capsys, "validate", str(path))
    assert status == 1
    assert "model 1 has < 2 clones" in out


def test_malformed_json_reports_position(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"models": [\n  {"id": 1,}\n]}')
    status, _, err = run(capsys, "dim", str(path))
    assert status == 1
    diag = json.loads(err)
    assert diag["error"] == "input" and diag["position"]["line"] == 2


def test_schema_error_reports_path(capsys, tmp_path):
    path = tmp_path / "schema.json"
    path.write_text(json.dumps({"models": [{"id": 1, "diameter": "big"}], "clones": []}))
    status, _, err = run(capsys, "validate", str(path))
    assert status == 1 and "/models/0/diameter" in json.loads(err)["message"]


def test_unknown_option_is_input_error(capsys):
    status, _, err = run(capsys, "dim", "middle_third", "--bogus")
    assert status == 1 and json.loads(err)["error"] == "input"


def test_reducible_is_computation_error(capsys):
    status, _, err = run(capsys, "dim", "figure_reducible")
    assert status == 2 and json.loads(err)["error"] == "not_irreducible"


def test_cap_exceeded(capsys):
    status, _, err = run(capsys, "invariant", "middle_third", "--L", "9", "--S", "2")
    diag = json.loads(err)
    assert status == 2 and diag["error"] == "cap_exceeded" and diag["estimate"] > 0


def test_matrix_json_round_trip(capsys):
    status, out, _ = run(capsys, "matrix", "figure_matrix", "--d", "star", "--json")
    assert status == 0
    data = json.loads(out)
    again = frobenius(SpectralMatrix.from_json(data["matrix"]))
    fd = data["frobenius"]
    assert abs(again.eigenvalue - fd["eigenvalue"]) <= 1e-12
    assert np.allclose(again.left_eigenvector, fd["left_eigenvector"], atol=1e-12, rtol=0)
    assert np.allclose(again.right_eigenvector, fd["right_eigenvector"], atol=1e-12, rtol=0)


def test_matrix_exact_and_symbolic(capsys):
    status, out, _ = run(capsys, "matrix", "figure_matrix", "--d", "symbolic")
    assert status == 0 and "(1/6)^d + (1/7)^d" in out
    status, out, _ = run(capsys, "matrix", "figure_reducible", "--d", "1", "--exact")
    assert status == 0 and "persistent zeros at [(3, 1), (3, 2)]" in out


def test_subdivide_agrees(capsys):
    status, out, _ = run(capsys, "subdivide", "figure_matrix", "--k", "4", "--d", "2", "--exact", "--json")
    data = json.loads(out)
    assert status == 0 and data["agree"]
    status, out, _ = run(capsys, "subdivide", "middle_third", "--k", "3", "--d", "star")
    assert status == 0 and "agrees" in out


def test_measure_and_geometry_commands(capsys):
    status, out, _ = run(capsys, "measure", "middle_third", "--beta", "3", "--json")
    assert status == 0 and json.loads(out)["lower_bounds"] == pytest.approx([0.25])
    status, out, _ = run(capsys, "separation", "middle_third", "--level", "10", "--json")
    assert status == 0 and json.loads(out)["beta_interval"][0] <= 3
    status, out, _ = run(capsys, "boxdim", "middle_third", "--level", "10")
    assert status == 0 and out.startswith("box-counting estimate 0.6")


def test_render_to_file(capsys, tmp_path):
    path = tmp_path / "mt.svg"
    status, _, _ = run(capsys, "render", "middle_third", "--levels", "3", "--out", str(path))
    assert status == 0 and path.read_text().count("<circle") == 15


def test_invariant_and_compare(capsys):
    status, out, _ = run(capsys, "invariant", "middle_third", "--L", "2", "--S", "1")
    assert status == 0 and json.loads(out) == pytest.approx([0.25, 0.5, 1.0])
    status, out, _ = run(capsys, "compare", "figure_matrix", "figure_matrix", "--model-b", "2", "--L", "6", "--S", "3")
    first, rest = out.split("\n", 1)
    assert status == 0 and first.startswith("CONSISTENT_WITH_SIMILAR")
    assert json.loads(rest)["verdict"] == "CONSISTENT_WITH_SIMILAR"
    status, out, _ = run(capsys, "compare", "middle_third", "fifths")
    assert out.startswith("INCOMPARABLE")


def test_massratio(capsys, tmp_path):
    pairs = tmp_path / "pairs.json"
    pairs.write_text(json.dumps([[[], []], [[1], [1]], [[2], [2]]]))
    status, out, _ = run(capsys, "massratio", "middle_third", "middle_third", str(pairs), "--json")
    data = json.loads(out)
    assert status == 0 and data["spectrum"] == pytest.approx([1.0])
    assert [p["mass_ratio"] for p in data["pairs"]] == pytest.approx([1.0, 1.0, 1.0])


def test_oracle_command(capsys):
    status, out, _ = run(capsys, "oracle", "moran", "1/2", "1/4")
    assert status == 0 and float(out) == pytest.approx(0.6942419136306, abs=1e-12)
    status, out, _ = run(capsys, "oracle", "charpoly", "symmetric_rank1")
    assert float(out) == pytest.approx(0.5, abs=1e-12)
    status, out, _ = run(capsys, "oracle", "subdivision", "middle_third", "--k", "3", "--d", "1", "--exact")
    assert out.strip() == "type 1: 8/27"


@pytest.mark.parametrize("argv", [
    ["dim", "figure_matrix", "--json"],
    ["measure", "figure_matrix"],
    ["separation", "figure_matrix", "--level", "8", "--report-level", "2"],
    ["render", "planar_multi", "--levels", "2"],
    ["compare", "middle_third", "middle_third_coarse", "--L", "4"],
])
def test_determinism(capsys, argv):
    first = run(capsys, *argv)
    assert run(capsys, *argv) == first


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "mmcantor", "dim", "middle_third", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["dimension"] == pytest.approx(0.6309297535714574, abs=1e-11)
