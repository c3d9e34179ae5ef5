"""One test per acceptance criterion, each printing a single pass/fail line."""

import json
import subprocess
import sys
import time

from conftest import ACCEPTANCE_LINES
from koszul_lab import suites

SEED = 42


def record(n, title, ok, detail=""):
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {title}" + (f"  ({detail})" if detail else "")
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def run_timed(fn):
    t0 = time.perf_counter()
    rep = fn(SEED)
    return rep, time.perf_counter() - t0


def test_criterion_01_koszul_acyclicity():
    rep, secs = run_timed(suites.koszul_acyclicity)
    ok = rep["pass"] and secs < 60
    assert record(1, "K1, K2 have cohomology k at (0,0) on [-12,0], QQ/F2/F7 x 20",
                  ok, f"{secs:.1f}s"), rep["witnesses"]


def test_criterion_02_char_p():
    rep, _ = run_timed(suites.char_p_cohomology)
    assert record(2, "H(T) for k -id-> k: F3 gives (0,0),(-6,6),(-5,6); QQ gives (0,0)",
                  rep["pass"]), rep["witnesses"]


def test_criterion_03_unit_counit():
    rep, _ = run_timed(suites.unit_counit)
    maps = rep["witnesses"][0].get("maps checked") if rep["pass"] else None
    assert record(3, "unit and counit are quasi-isomorphisms on [-12,0], QQ and F5",
                  rep["pass"], f"{maps} maps" if maps else ""), rep["witnesses"]


def test_criterion_04_duality_involution():
    rep, _ = run_timed(suites.duality_involution)
    assert record(4, "dualize twice is the identity on 10 random finite modules",
                  rep["pass"]), rep["witnesses"]


def test_criterion_05_degree_formula():
    rep, _ = run_timed(suites.degree_formula)
    assert record(5, "kappa(M[n]<m>) = kappa(M)[-n+m]<-m> for (n,m) in [-2,2]^2",
                  rep["pass"]), rep["witnesses"]


def test_criterion_06_derived_intersection():
    rep, secs = run_timed(suites.derived_intersection)
    ok = rep["pass"] and secs < 120
    assert record(6, "derived intersection equals Tor oracle, 4 canonical + 20 random setups",
                  ok, f"{secs:.1f}s"), rep["witnesses"]


def test_criterion_07_exchange():
    rep, _ = run_timed(suites.exchange)
    assert record(7, "kappa swaps free and trivial modules, kappa_inv swaps them back",
                  rep["pass"]), rep["witnesses"]


def test_criterion_08_fg_preservation():
    rep, _ = run_timed(suites.fg_preservation)
    assert record(8, "kappa of fg modules is window-generated", rep["pass"]), rep["witnesses"]


def test_criterion_09_morphisms():
    rep, _ = run_timed(suites.morphism_compat)
    assert record(9, "pushforward/pullback commute with kappa on E = k^2, free and trivial",
                  rep["pass"]), rep["witnesses"]


def test_criterion_10_base_change():
    rep, _ = run_timed(suites.base_change)
    assert record(10, "base change F5 -> F25 commutes with kappa and its inverse",
                  rep["pass"]), rep["witnesses"]


def test_criterion_11_cli_determinism():
    cmd = [sys.executable, "-m", "koszul_lab.cli", "verify", "--suite", "all",
           "--seed", str(SEED), "--format", "json"]
    runs = []
    for _ in range(2):
        t0 = time.perf_counter()
        runs.append((subprocess.run(cmd, capture_output=True), time.perf_counter() - t0))
    (a, ta), (b, tb) = runs
    report = json.loads(a.stdout)
    ok = a.stdout == b.stdout and a.returncode == 0 and report["pass"] and max(ta, tb) < 600
    assert record(11, "verify --suite all --seed 42 is byte-identical across runs",
                  ok, f"{ta:.1f}s, {tb:.1f}s"), a.stderr.decode()
