import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from rigiscope.cli import main
from rigiscope.framework import parse

TRIANGLE = {"version": 1, "dimension": 2, "model": "euclidean",
            "vertices": [[0, 0], [1, 0], [0.3, 0.8]], "edges": [[0, 1], [1, 2], [0, 2]]}
SQUARE = {"version": 1, "dimension": 2, "model": "euclidean",
          "vertices": [[0, 0], [1, 0], [1, 1], [0, 1]], "edges": [[0, 1], [1, 2], [2, 3], [0, 3]]}
ON_ABSOLUTE = {"version": 1, "dimension": 2, "model": "proj_hyperbolic",
               "vertices": [[0.1, 0.0], [0.0, 0.2], [0.6, 0.8]], "edges": [[0, 1], [1, 2], [0, 2]]}


@pytest.fixture
def write(tmp_path):
    def _write(name, doc):
        path = tmp_path / name
        path.write_text(doc if isinstance(doc, str) else json.dumps(doc))
        return str(path)
    return _write


def _json_stream(text):
    decoder, pos, docs = json.JSONDecoder(), 0, []
    while text[pos:].strip():
        doc, pos = decoder.raw_decode(text, pos)
        docs.append(doc)
        pos += len(text[pos:]) - len(text[pos:].lstrip())
    return docs


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_analyze_triangle(capsys, write):
    code, out, _ = run(capsys, "analyze", write("t.json", TRIANGLE))
    assert code == 0
    assert json.loads(out)["verdict"] == "RIGID"


def test_multiple_inputs_keep_input_order(capsys, write):
    paths = [write("sq.json", SQUARE), write("t.json", TRIANGLE), write("sq2.json", SQUARE)]
    code, out, _ = run(capsys, "analyze", *paths)
    assert code == 0
    verdicts = [doc["verdict"] for doc in _json_stream(out)]
    assert verdicts == ["FLEXIBLE", "RIGID", "FLEXIBLE"]


def test_reports_are_byte_identical(capsys, write):
    path = write("t.json", TRIANGLE)
    outputs = {run(capsys, "verify-equivalence", path)[1] for _ in range(3)}
    assert len(outputs) == 1


def test_verify_equivalence_octahedron(capsys, tmp_path):
    octa = tmp_path / "octa.json"
    assert run(capsys, "examples", "octahedron", "--out", str(octa))[0] == 0
    code, out, _ = run(capsys, "verify-equivalence", str(octa))
    rep = json.loads(out)
    assert code == 0 and rep["pass"] is True
    assert rep["geometries"]["proj_sphere"]["max_residual"] <= 1e-9


def test_absolute_vertex_exit_code(capsys, write):
    code, out, err = run(capsys, "analyze", write("abs.json", ON_ABSOLUTE))
    assert code == 1 and out == ""
    assert "vertex 2" in err and "absolute" in err


def test_parse_error_exit_code(capsys, write):
    doc = dict(TRIANGLE)
    del doc["edges"]
    code, _, err = run(capsys, "analyze", write("bad.json", doc))
    assert code == 2 and "edges" in err
    code, _, err = run(capsys, "analyze", "/nonexistent/path.json")
    assert code == 2


def test_worst_exit_code_wins_and_good_files_still_report(capsys, write):
    code, out, _ = run(capsys, "analyze", write("t.json", TRIANGLE), write("abs.json", ON_ABSOLUTE),
                       write("bad.json", "{"))
    assert code == 2
    assert json.loads(out)["verdict"] == "RIGID"


def test_matrix_csv_and_json(capsys, write):
    path = write("t.json", TRIANGLE)
    code, out, _ = run(capsys, "matrix", "--format", "csv", path)
    rows = list(csv.reader(io.StringIO(out)))
    assert code == 0 and len(rows) == 4 and rows[0][0] == "row"
    code, out, _ = run(capsys, "matrix", path)
    assert json.loads(out)["shape"] == [3, 6]
    code, _, err = run(capsys, "analyze", "--format", "csv", path)
    assert code == 2 and "csv" in err


def test_motions_and_stresses(capsys, write):
    path = write("sq.json", SQUARE)
    motions = json.loads(run(capsys, "motions", path)[1])
    assert motions["dimension"] == 4 and motions["internal_dim"] == 1
    assert len(motions["basis"]) == 4 and len(motions["basis"][0]) == 8
    stresses = json.loads(run(capsys, "stresses", path)[1])
    assert stresses["dimension"] == 0


def test_transfer_and_back(capsys, write):
    path = write("t.json", TRIANGLE)
    code, out, _ = run(capsys, "transfer", "--to", "sphere_ambient", path)
    fw = parse(out)
    assert code == 0 and fw.coordinates == "ambient"
    sph = write("s.json", out)
    code, out, _ = run(capsys, "transfer", "--to", "euclidean", sph)
    assert np.allclose(parse(out).points, TRIANGLE["vertices"])
    code, _, err = run(capsys, "transfer", "--to", "proj_hyperbolic", path)
    assert code == 1 and "vertex" in err


def test_cone(capsys, write, tmp_path):
    path = write("t.json", TRIANGLE)
    sph = tmp_path / "s.json"
    run(capsys, "transfer", "--to", "sphere_ambient", "--out", str(sph), path)
    code, out, _ = run(capsys, "cone", str(sph))
    cone = parse(out)
    assert code == 0 and cone.dimension == 3 and cone.vertex_count == 4
    assert run(capsys, "cone", path)[0] == 2


def test_polar_both_directions(capsys, tmp_path):
    d3 = tmp_path / "d3.json"
    run(capsys, "examples", "octahedron", "--geometry", "proj_exterior_hyperbolic", "--scale", "2",
        "--out", str(d3))
    code, out, _ = run(capsys, "polar", str(d3))
    system = json.loads(out)
    assert code == 0 and len(system["hyperplanes"]) == 6 and len(system["angle_edges"]) == 12
    planes = tmp_path / "planes.json"
    planes.write_text(out)
    report = json.loads(run(capsys, "polar", "--stiffness", str(planes))[1])
    assert report["verdict"] == "STIFF" and report["agree"] is True
    code, out, _ = run(capsys, "polar", str(planes))
    assert parse(out).geometry.model.value == "proj_exterior_hyperbolic"


def test_polar_rejects_other_models(capsys, write):
    code, _, err = run(capsys, "polar", write("t.json", TRIANGLE))
    assert code == 1 and "proj_exterior_hyperbolic" in err


def test_examples(capsys):
    code, out, _ = run(capsys, "examples", "--list")
    assert code == 0 and "octahedron" in json.loads(out)
    code, out, _ = run(capsys, "examples", "bipyramid(6)", "--analyze")
    assert json.loads(out)["rank"] == 18
    code, out, _ = run(capsys, "examples", "simplex", "--dimension", "4")
    assert parse(out).vertex_count == 5
    code, _, err = run(capsys, "examples", "octahedron", "--geometry", "proj_hyperbolic")
    assert code == 1 and "vertex 0" in err
    assert run(capsys, "examples", "dodecahedron")[0] == 2
    assert run(capsys, "examples")[0] == 2


def test_tolerance_flags(capsys, write, monkeypatch):
    near = dict(ON_ABSOLUTE, vertices=[[0.1, 0.0], [0.0, 0.2], [0.6, 0.7999]])
    path = write("near.json", near)
    assert run(capsys, "analyze", path)[0] == 0
    assert run(capsys, "analyze", "--tol", "1e-3", path)[0] == 1
    monkeypatch.setenv("RIGISCOPE_TOL", "1e-3")
    assert run(capsys, "analyze", path)[0] == 1
    assert run(capsys, "analyze", "--tol", "1e-9", path)[0] == 0
    monkeypatch.setenv("RIGISCOPE_TOL", "-1")
    assert run(capsys, "analyze", path)[0] == 2
    monkeypatch.delenv("RIGISCOPE_TOL")
    assert run(capsys, "analyze", "--tol", "0", path)[0] == 2


def test_formal_flag(capsys, write):
    outside = dict(ON_ABSOLUTE, vertices=[[0.1, 0.0], [0.0, 0.2], [1.5, 0.3]])
    path = write("out.json", outside)
    assert run(capsys, "analyze", path)[0] == 1
    code, out, _ = run(capsys, "analyze", "--formal", path)
    assert code == 0 and json.loads(out)["verdict"] == "RIGID"


def test_out_flag(capsys, write, tmp_path):
    dest = tmp_path / "report.json"
    code, out, _ = run(capsys, "analyze", "--out", str(dest), write("t.json", TRIANGLE))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["verdict"] == "RIGID"


def test_console_script_entry_point(write):
    proc = subprocess.run([sys.executable, "-m", "rigiscope.cli", "analyze", write("t.json", TRIANGLE)],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and '"verdict": "RIGID"' in proc.stdout
