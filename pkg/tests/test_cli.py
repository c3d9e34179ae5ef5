import json
import subprocess
import sys

import pytest

from koszul_lab.cli import main
from koszul_lab.dgmod import WindowError

POINT = {"field": {"type": "Q"}, "complex": {"ranks": {"0": 1}, "diffs": {}},
         "window": {"j_min": 0, "j_max": 6}}
ORIGIN = {"field": {"type": "Q"}, "setup": {"dim_E": 1, "F1": [], "F2": []},
          "window": {"j_min": -8, "j_max": 0}}


@pytest.fixture
def problem(tmp_path):
    def write(obj, name="p.json"):
        p = tmp_path / name
        p.write_text(json.dumps(obj))
        return str(p)
    return write


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_cohomology_of_T(problem, capsys):
    code, out, _ = run(capsys, "cohomology", "--input", problem(POINT), "--module", "T",
                       "--format", "json")
    assert code == 0
    assert json.loads(out)["table"] == [{"i": 0, "j": 2 * m, "dim": 1} for m in range(4)]


def test_csv_and_table_formats(problem, capsys):
    _, out, _ = run(capsys, "cohomology", "-i", problem(POINT), "-f", "csv")
    assert out.splitlines()[:2] == ["i,j,dim", "0,0,1"]
    _, out, _ = run(capsys, "hilbert", "-i", problem(POINT), "-m", "k_T")
    assert "euler: 0:1" in out


def test_verify_acyclicity_on_file(problem, capsys):
    code, out, _ = run(capsys, "verify", "--suite", "koszul-acyclicity", "-i", problem(POINT),
                       "-f", "json")
    rep = json.loads(out)
    assert code == 0 and rep["pass"]
    assert rep["suites"][0]["witnesses"][0]["table"] == [[0, 0, 1]]


def test_intersect_origin(problem, capsys):
    code, out, _ = run(capsys, "intersect", "-i", problem(ORIGIN), "-f", "json")
    rep = json.loads(out)
    assert code == 0
    assert rep["T side"]["table"] == [{"i": -1, "j": 2, "dim": 1}, {"i": 0, "j": 0, "dim": 1}]
    assert rep["R side"]["table"] == [{"i": 0, "j": -2 * m, "dim": 1} for m in range(4, -1, -1)]
    assert all(c["pass"] for c in rep["checks"])


def test_dual_and_resolve(problem, capsys):
    code, out, _ = run(capsys, "dual", "-i", problem(POINT), "-m", "k_T", "--window=-4:0", "-f", "json")
    rep = json.loads(out)
    assert code == 0 and rep["functor"] == "kappa"
    assert rep["table"] == [{"i": -1, "j": -2, "dim": 1}, {"i": 0, "j": 0, "dim": 1}]
    code, out, _ = run(capsys, "dual", "-i", problem(POINT), "-m", "k_R", "-f", "json")
    assert json.loads(out)["functor"] == "kappa_inv"
    code, out, _ = run(capsys, "resolve", "-i", problem(POINT), "-m", "k_T", "-f", "json")
    rep = json.loads(out)
    assert code == 0 and rep["generators"] == {"(0,0)": 1, "(-1,2)": 1}


def test_errors_exit_2(problem, capsys):
    code, _, err = run(capsys, "cohomology", "-i", problem(POINT), "-m", "nope")
    assert code == 2 and "unknown module" in err
    code, _, err = run(capsys, "cohomology", "-i", problem({**POINT, "field": {"type": "Fp", "p": 4}}))
    assert code == 2 and "p not prime" in err
    code, _, err = run(capsys, "verify", "--suite", "bogus")
    assert code == 2 and "unknown suite" in err
    code, _, err = run(capsys, "intersect", "-i", problem(POINT))
    assert code == 2


def test_resolution_outside_its_window_raises(problem):
    from koszul_lab.bigraded import Window
    from koszul_lab.dgmod import module_cohomology, semifree_resolution
    from koszul_lab.problem import parse
    p = parse(problem(POINT))
    P, _ = semifree_resolution(p.module("k_T"), Window(0, 2))
    with pytest.raises(WindowError) as exc:
        module_cohomology(P, Window(0, 4))
    assert exc.value.required == 3


def test_window_error_exit_code(problem, capsys, monkeypatch):
    import koszul_lab.cli as cli

    def boom(args):
        raise WindowError("presentation too short", required=7)
    monkeypatch.setitem(cli.HANDLERS, "cohomology", boom)
    code, _, err = run(capsys, "cohomology", "-i", problem(POINT))
    assert code == 2 and "required window 7" in err


def test_failing_check_exits_1(problem, capsys, monkeypatch):
    import koszul_lab.cli as cli
    monkeypatch.setitem(cli.HANDLERS, "verify",
                        lambda args: {"suites": [{"check": "x", "pass": False, "window": None,
                                                  "witnesses": [1]}], "pass": False})
    code, out, err = run(capsys, "verify")
    assert code == 1 and json.loads(err)["failed"] == ["x"]


def test_threads_env(problem, capsys, monkeypatch):
    monkeypatch.setenv("KOSZUL_LAB_THREADS", "zero")
    code, _, err = run(capsys, "cohomology", "-i", problem(POINT))
    assert code == 2 and "KOSZUL_LAB_THREADS" in err
    monkeypatch.setenv("KOSZUL_LAB_THREADS", "2")
    assert run(capsys, "cohomology", "-i", problem(POINT))[0] == 0


def test_console_entry_point(problem):
    r = subprocess.run([sys.executable, "-m", "koszul_lab.cli", "check", "-i", problem(POINT)],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "all checks pass" in r.stdout
