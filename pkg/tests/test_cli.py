import json
import time

import numpy as np
import pytest

from lpmink.cli import main

from conftest import INSTANCES


def _write(tmp_path, name, data):
    f = tmp_path / name
    f.write_text(json.dumps(data))
    return str(f)


def test_check_tetrahedron(capsys):
    assert main(["check", str(INSTANCES / "tetrahedron.json")]) == 0
    assert "essential subspaces: none" in capsys.readouterr().out


def test_check_cube_lists_subspaces(capsys):
    assert main(["check", str(INSTANCES / "cube.json")]) == 1
    out = capsys.readouterr().out
    assert "essential subspaces: 6" in out
    assert "members [0, 3]" in out


def test_check_too_few(tmp_path, capsys):
    f = _write(tmp_path, "few.json", {"p": -1, "dim": 3, "directions": np.eye(3).tolist(),
                                      "weights": [1, 1, 1]})
    assert main(["check", f]) == 2
    assert "TooFewDirections" in capsys.readouterr().err


@pytest.mark.parametrize("p", [0, 0.5, 2])
def test_nonnegative_p_rejected(tmp_path, capsys, p):
    f = _write(tmp_path, "pos.json", {"p": p, "dim": 2, "directions": [[1, 0], [0, 1], [-1, -1]],
                                      "weights": [1, 1, 1]})
    assert main(["check", f]) == 2
    assert "p < 0 only" in capsys.readouterr().err


def test_bad_json(tmp_path):
    f = tmp_path / "bad.json"
    f.write_text("{not json")
    assert main(["check", str(f)]) == 2
    assert main(["solve", str(f)]) == 2


def test_solve_square(tmp_path):
    out = tmp_path / "sq.json"
    assert main(["solve", str(INSTANCES / "square.json"), "--out", str(out)]) == 0
    d = json.loads(out.read_text())
    assert np.allclose(d["result"]["polytope_solution"]["support_numbers"], 1, atol=1e-8)
    assert d["verification"]["pass"]


def test_solve_triangle(tmp_path):
    out = tmp_path / "tri.json"
    assert main(["solve", str(INSTANCES / "triangle.json"), "--out", str(out)]) == 0
    P = json.loads(out.read_text())["result"]["polytope_solution"]
    assert np.allclose(P["support_numbers"], 1, atol=1e-8)
    V = np.array(P["vertices"])
    sides = np.linalg.norm(V - np.roll(V, 1, axis=0), axis=1)
    assert np.allclose(sides, 2 * np.sqrt(3), atol=1e-8)


def test_solve_hemisphere_is_validation_error():
    assert main(["solve", str(INSTANCES / "hemisphere.json")]) == 2


def test_solve_exit_codes(tmp_path, capsys):
    f = str(INSTANCES / "random_3d.json")
    assert main(["solve", f, "--max-iters", "1", "--out", str(tmp_path / "x.json")]) == 4
    d = json.loads((INSTANCES / "random_3d.json").read_text())
    d["opts"] = {"diameter_cap": 1.5}
    g = _write(tmp_path, "cap.json", d)
    assert main(["solve", g, "--out", str(tmp_path / "y.json")]) == 3
    assert "essential subspace" in capsys.readouterr().err


def test_solve_many_with_jobs(tmp_path):
    files = [str(INSTANCES / f"{n}.json") for n in ("triangle", "tetrahedron", "random_2d")]
    assert main(["solve", *files, "--jobs", "2", "--out", str(tmp_path / "res")]) == 0
    assert len(list((tmp_path / "res").glob("*.result.json"))) == 3


def test_shipped_instances_fast(tmp_path):
    for f in sorted(INSTANCES.glob("*.json")):
        if f.stem == "hemisphere":
            continue
        t = time.perf_counter()
        assert main(["solve", str(f), "--out", str(tmp_path / f.name)]) == 0, f.name
        assert time.perf_counter() - t < 10


def test_verify_and_report(tmp_path, capsys):
    res = tmp_path / "r2.json"
    assert main(["solve", str(INSTANCES / "random_2d.json"), "--out", str(res)]) == 0
    rep = tmp_path / "rep.json"
    assert main(["verify", str(res), "--out", str(rep)]) == 0
    d = json.loads(rep.read_text())
    assert d["pass"] and len(d["per_direction"]) == 6
    assert main(["report", str(res), "--out", str(tmp_path / "plot")]) == 0
    svg = (tmp_path / "plot.svg").read_text()
    assert svg.count("<polygon") == 1
    pts = svg.split('points="')[1].split('"')[0].split()
    assert len(pts) == 6
    assert svg.count('class="residual"') == 6
    assert len((tmp_path / "plot_edges.csv").read_text().splitlines()) == 1 + 6
    assert len((tmp_path / "plot_residuals.csv").read_text().splitlines()) == 1 + 6


def test_report_3d_edges(tmp_path):
    res = tmp_path / "r3.json"
    assert main(["solve", str(INSTANCES / "cube.json"), "--out", str(res)]) == 0
    assert main(["report", str(res), "--out", str(tmp_path / "c")]) == 0
    assert len((tmp_path / "c_edges.csv").read_text().splitlines()) == 1 + 12


def test_verify_detects_tampering(tmp_path):
    res = tmp_path / "t.json"
    assert main(["solve", str(INSTANCES / "tetrahedron.json"), "--out", str(res)]) == 0
    d = json.loads(res.read_text())
    d["result"]["polytope_solution"]["support_numbers"][1] *= 1.01
    res.write_text(json.dumps(d))
    assert main(["verify", str(res)]) == 1


def test_gen_deterministic(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["gen", "2", "5", "-1.5", "--seed", "7", "--out", str(a)]) == 0
    assert main(["gen", "2", "5", "-1.5", "--seed", "7", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert main(["check", str(a)]) == 0


def test_gen_rejects_bad_args():
    assert main(["gen", "2", "5", "1.5"]) == 2
    assert main(["gen", "3", "3", "-1"]) == 2


def test_log_env(monkeypatch, capsys):
    monkeypatch.setenv("LPMINK_LOG", "info")
    assert main(["solve", str(INSTANCES / "triangle.json"), "--out", "-"]) == 0
    assert "INFO" in capsys.readouterr().err
