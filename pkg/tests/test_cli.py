import json
import math
import subprocess
import sys

import numpy as np
import pytest

from ellipsotope import cli
from ellipsotope.containment import SolverFailure, containment_radius
from ellipsotope.documents import ProblemDocument, SetDocument, dumps, serialize
from ellipsotope.safeset import HPolyhedron, LtiSystem, SafeSetProblem
from ellipsotope.sets import Ellipsotope
from helpers import WORKED_G

DOUBLE_A = np.array([[0.0, 1.0], [0.0, 0.0]])
DOUBLE_B = np.array([[0.0], [1.0]])


def write(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(obj if isinstance(obj, str) else dumps(obj))
    return str(path)


def set_file(tmp_path, name, p, G, c=None):
    G = np.asarray(G, dtype=float)
    c = np.zeros(G.shape[0]) if c is None else c
    return write(tmp_path, name, serialize(SetDocument(Ellipsotope(p, G, c))))


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr().out
    return code, out


def test_contain_exit_codes(tmp_path, capsys):
    square = set_file(tmp_path, "square.json", "inf", np.eye(2))
    disk = set_file(tmp_path, "disk.json", 2, 2 * np.eye(2))
    code, out = run(["contain", square, disk], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["verdict"] == "contained"
    assert doc["r_upper"] == pytest.approx(math.sqrt(2) / 2, rel=1e-6)
    assert "timing" not in doc or doc["timing"] is None
    code, out = run(["contain", disk, square], capsys)
    assert code == 1 and json.loads(out)["verdict"] == "not_contained"


def test_contain_unknown_verdict(tmp_path, capsys):
    inbody = Ellipsotope("inf", WORKED_G, np.zeros(2))
    disk = Ellipsotope(2, np.eye(2), np.zeros(2))
    res = containment_radius(inbody, disk, "lr")
    assert res.r_lower < res.r_upper * (1 - 1e-3)
    scale = math.sqrt(res.r_lower * res.r_upper)
    a = set_file(tmp_path, "a.json", "inf", WORKED_G)
    b = set_file(tmp_path, "b.json", 2, scale * np.eye(2))
    code, out = run(["contain", a, b, "--method", "lr"], capsys)
    assert code == 2 and json.loads(out)["verdict"] == "unknown"


def test_contain_is_byte_stable(tmp_path, capsys):
    a = set_file(tmp_path, "a.json", "inf", WORKED_G)
    b = set_file(tmp_path, "b.json", 2, np.eye(2))
    outs = {run(["contain", a, b], capsys)[1] for _ in range(3)}
    assert len(outs) == 1


def test_contain_timing_flag(tmp_path, capsys):
    a = set_file(tmp_path, "a.json", 2, np.eye(2))
    code, out = run(["contain", a, a, "--timing"], capsys)
    assert code == 0 and json.loads(out)["timing"] >= 0


def test_contain_usage_errors(tmp_path, capsys):
    a = set_file(tmp_path, "a.json", 2, np.eye(2))
    b = set_file(tmp_path, "b.json", 2, np.eye(3))
    assert cli.main(["contain", a, b]) == 64
    bad = write(tmp_path, "bad.json", "{not json")
    assert cli.main(["contain", bad, a]) == 64
    assert cli.main(["contain", str(tmp_path / "missing.json"), a]) == 64
    with pytest.raises(SystemExit) as exc:
        cli.main(["contain", a, a, "--method", "magic"])
    assert exc.value.code == 64
    with pytest.raises(SystemExit) as exc:
        cli.main([])
    assert exc.value.code == 64


def test_solver_failure_exit_code(tmp_path, capsys, monkeypatch):
    def boom(*args, **kwargs):
        raise SolverFailure("numerical trouble")

    monkeypatch.setattr(cli, "containment_radius", boom)
    a = set_file(tmp_path, "a.json", 2, np.eye(2))
    assert cli.main(["contain", a, a]) == 70
    assert "solver failure" in capsys.readouterr().err


def test_norm_lpq_identity(tmp_path, capsys):
    for n in (2, 3, 5):
        path = write(tmp_path, f"I{n}.json", {"kind": "matrix", "rows": np.eye(n)})
        code, out = run(["norm", path, "--kind", "lpq", "--p", "2", "--q", "1"], capsys)
        doc = json.loads(out)
        assert code == 0 and doc["value"] == pytest.approx(n) and doc["exact"]


def test_norm_operator(tmp_path, capsys):
    path = write(tmp_path, "A.json", [[1, 1], [1, -1]])
    code, out = run(["norm", path, "--p", "inf", "--q", "1"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["value"] == pytest.approx(2) and doc["exact"] and doc["p"] == "inf"
    code, out = run(["norm", path, "--kind", "op", "--p", "3", "--q", "2"], capsys)
    assert code == 0 and json.loads(out)["exact"] is False


def test_norm_bad_exponent(tmp_path):
    path = write(tmp_path, "A.json", [[1.0]])
    with pytest.raises(SystemExit) as exc:
        cli.main(["norm", path, "--p", "0.5", "--q", "1"])
    assert exc.value.code == 64


def test_hardness_demo_identity(tmp_path, capsys):
    path = write(tmp_path, "I.json", {"kind": "matrix", "rows": np.eye(2)})
    code, out = run(["hardness-demo", path, "--delta", "0.05"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert abs(doc["xi_star"] / 2 - 1) <= 0.05
    assert doc["oracle"] == pytest.approx(2) and doc["oracle_exact"]
    assert doc["iterations"] <= math.log2(2 / 0.05) + 1


def test_hardness_demo_rejects(tmp_path):
    zero = write(tmp_path, "Z.json", [[0.0, 0.0], [0.0, 0.0]])
    assert cli.main(["hardness-demo", zero]) == 64
    one = write(tmp_path, "I.json", [[1.0, 0.0], [0.0, 1.0]])
    assert cli.main(["hardness-demo", one, "--p", "1"]) == 64
    assert cli.main(["hardness-demo", one, "--delta", "0"]) == 64


def small_problem(u_max=5.0, w=0.1):
    sysm = LtiSystem(DOUBLE_A, DOUBLE_B, DOUBLE_B.copy())
    return SafeSetProblem(sysm, HPolyhedron.box([-5, -5], [5, 5]), HPolyhedron.box([-u_max], [u_max]),
                          [[w]], 1.0, 10, template="zonotope", m=4, substeps=4)


def test_safeset_writes_artifacts(tmp_path, capsys):
    prob = write(tmp_path, "problem.json", serialize(ProblemDocument(small_problem())))
    outs = []
    for name in ("run1", "run2"):
        code, out = run(["safeset", prob, "--out", str(tmp_path / name)], capsys)
        assert code == 0
        outs.append(out)
    summary = json.loads(outs[0])
    assert summary["status"] == "ok"
    assert summary["files"] == ["T.json", "T_hat.json", "controller.json", "diagnostics.json",
                                "projection.csv", "reach.csv"]
    for f in summary["files"]:
        assert (tmp_path / "run1" / f).read_bytes() == (tmp_path / "run2" / f).read_bytes()
    assert outs[0] == outs[1]
    header = (tmp_path / "run1" / "reach.csv").read_text().splitlines()[0]
    assert header == "t,c1,c2,r1,r2"
    T = json.loads((tmp_path / "run1" / "T.json").read_text())
    assert T["kind"] == "ellipsotope" and T["p"] == "inf" and len(T["generators"]) == 4


def test_safeset_template_override(tmp_path, capsys):
    prob = write(tmp_path, "problem.json", serialize(ProblemDocument(small_problem())))
    code, out = run(["safeset", prob, "--template", "ellipsoid", "--out", str(tmp_path / "e")],
                    capsys)
    assert code == 0 and json.loads(out)["template"] == "ellipsoid"
    T = json.loads((tmp_path / "e" / "T.json").read_text())
    assert T["p"] == 2


def test_safeset_infeasible(tmp_path, capsys):
    prob = write(tmp_path, "problem.json",
                 serialize(ProblemDocument(small_problem(u_max=0.05, w=10.0))))
    code, out = run(["safeset", prob, "--out", str(tmp_path / "x")], capsys)
    assert code == 3 and json.loads(out)["status"] == "infeasible"
    assert not (tmp_path / "x").exists()


def test_safeset_bad_tolerance(tmp_path, capsys, monkeypatch):
    prob = write(tmp_path, "problem.json", serialize(ProblemDocument(small_problem())))
    monkeypatch.setenv(cli.TOL_ENV, "tight")
    assert cli.main(["safeset", prob, "--out", str(tmp_path / "x")]) == 64


def test_safeset_platoon_shorthand(tmp_path, capsys):
    prob = write(tmp_path, "platoon.json", {"kind": "platoon", "k": 2})
    code, out = run(["safeset", prob, "--template", "ellipsoid", "--out", str(tmp_path / "p")],
                    capsys)
    assert code == 0
    ctl = json.loads((tmp_path / "p" / "controller.json").read_text())
    assert ctl["kind"] == "controller" and len(ctl["c_u"]) == 30


def test_console_script_entry_point(tmp_path):
    a = set_file(tmp_path, "a.json", 2, np.eye(2))
    proc = subprocess.run([sys.executable, "-m", "ellipsotope.cli", "contain", a, a],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["verdict"] == "contained"
