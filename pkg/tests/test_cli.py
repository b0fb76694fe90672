import csv
import io
import json
from fractions import Fraction as F

import pytest

from cgiter.cli import main

ONE_D = {"n": 1, "m": 1, "c": [1], "A": [[2]], "b": [3]}


@pytest.fixture
def one_d(tmp_path):
    p = tmp_path / "one.json"
    p.write_text(json.dumps(ONE_D))
    return str(p)


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_solve(capsys, one_d, tmp_path):
    code, out, _ = run(capsys, "solve", one_d, "--ilp")
    assert code == 0 and "lp_objective: 3/2" in out and "ilp_objective: 1" in out and "basis_det: 2" in out
    inf = tmp_path / "inf.json"
    inf.write_text(json.dumps({"c": [1], "A": [[1], [-1]], "b": [1, -2]}))
    code, out, _ = run(capsys, "solve", str(inf))
    assert code == 0 and "status: infeasible" in out
    code, _, err = run(capsys, "solve", str(tmp_path / "missing.json"))
    assert code == 2


@pytest.mark.parametrize("payload,needle", [
    ('{"c": [1], "A": [[2]], "b": [1.5]}', "b[0]"),
    ('{"c": [1], "A": [[2, 1]], "b": [1]}', "A[0]"),
    ('{"c": [1], "b": [1]}', "'A'"),
    ('{"c": [1],\n "A": [[2]], "b": [1,]}', "line 2"),
    ('{"n": 2, "c": [1], "A": [[2]], "b": [1]}', "n = 2"),
])
def test_solve_parse_errors(capsys, tmp_path, payload, needle):
    p = tmp_path / "bad.json"
    p.write_text(payload)
    code, _, err = run(capsys, "solve", str(p))
    assert code == 2 and needle in err


def test_cuts(capsys, one_d, tmp_path):
    code, out, _ = run(capsys, "cuts", one_d, "--strategy", "0")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and {r["t"] for r in rows} == {"1"}
    code, out, _ = run(capsys, "cuts", one_d)
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == 6 and all(r["gap_closed"] == "100" for r in rows)
    code, out, _ = run(capsys, "cuts", one_d, "--strategy", "approx-add", "--delta", "1/64")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["approx"] == "true"
    integral = tmp_path / "int.json"
    integral.write_text(json.dumps({"c": [1], "A": [[1]], "b": [3]}))
    code, out, _ = run(capsys, "cuts", str(integral))
    assert code == 0 and "no fractional variables" in out
    code, _, _ = run(capsys, "cuts", one_d, "--strategy", "4", "--guard", "1")
    assert code == 3


def test_lattice(capsys, tmp_path):
    code, out, _ = run(capsys, "lattice", "1/2 1/2", "--action", "tau")
    lo = F(out.split("tau_lower: ")[1].split()[0])
    hi = F(out.split("tau_upper: ")[1].split()[0])
    assert code == 0 and lo <= F(1, 2) <= hi
    code, out, _ = run(capsys, "lattice", "1/4 3/4", "--action", "basis")
    assert "det: 1/4" in out
    code, out, _ = run(capsys, "lattice", '{"p": [0, 0], "q": 1}', "--action", "sv")
    assert "lambda1_sq: 1" in out
    nu_file = tmp_path / "nu.json"
    nu_file.write_text('{"p": [1, 3], "q": 4}')
    code, out, _ = run(capsys, "lattice", str(nu_file), "--action", "lll")
    assert code == 0 and "q: 4" in out
    code, out, _ = run(capsys, "lattice", "1/4 3/4", "--action", "babai", "--target", "1/3 1/5")
    assert "babai: 1/2 1/2" in out
    code, out, _ = run(capsys, "lattice", "1/4 3/4", "--action", "dual")
    assert code == 0 and "b_dual[1]" in out
    assert run(capsys, "lattice", "1/7 2/7 3/7 4/7 5/7", "--action", "tau")[0] == 3
    assert run(capsys, "lattice", "1/x")[0] == 2
    assert run(capsys, "lattice", "1/4 3/4", "--action", "babai")[0] == 2


def test_iterates(capsys, tmp_path):
    code, out, _ = run(capsys, "iterates", "1/2 1/2")
    assert code == 0 and out.splitlines()[1:] == ["1,1/2,1/2,0.500000,0.500000"]
    path = tmp_path / "fig.csv"
    run(capsys, "iterates", "1/256 255/256 255/256", "-o", str(path))
    rows = list(csv.DictReader(open(path)))
    assert len(rows) == 255 and all(0 <= F(r[k]) < 1 for r in rows for k in ("x1", "x2", "x3"))


def test_table1_cli(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"m_values": [3], "n_values": [4], "instances_per_cell": 2}))
    a, b, c = tmp_path / "a.csv", tmp_path / "b.csv", tmp_path / "c.csv"
    assert run(capsys, "table1", "--config", str(cfg), "--seed", "1", "-o", str(a))[0] == 0
    run(capsys, "table1", "--config", str(cfg), "--seed", "1", "-o", str(b))
    run(capsys, "table1", "--config", str(cfg), "--seed", "2", "-o", str(c))
    assert a.read_bytes() == b.read_bytes()
    assert a.read_text().splitlines()[0] == c.read_text().splitlines()[0]
    assert b"\r\n" not in a.read_bytes()


def test_mc_cli(capsys, tmp_path):
    out = tmp_path / "mc.csv"
    code, stdout, _ = run(capsys, "mc", "--d", "2", "--T", "12", "--samples", "1000", "--tol", "1/100",
                          "--R-grid", "1/2 1 2 3", "--seed", "5", "-o", str(out))
    assert code == 0 and "slope" in stdout
    rows = list(csv.DictReader(open(out)))
    assert rows[-1]["above"] == "0"  # 3 > (sqrt 2 / 2) sqrt 12
    assert run(capsys, "mc", "--d", "4")[0] == 3
    assert run(capsys, "mc", "--T", "1", "--samples", "1000")[0] == 2
