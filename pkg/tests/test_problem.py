import json

import pytest

from koszul_lab.bigraded import Window, cohomology
from koszul_lab.problem import ProblemError, emit, parse, parse_obj

MINIMAL = {"field": {"type": "Q"}, "complex": {"ranks": {"0": 1}, "diffs": {}},
           "window": {"j_min": -6, "j_max": 0}}


def test_minimal_file(tmp_path):
    p = tmp_path / "p.json"
    p.write_text(json.dumps(MINIMAL))
    prob = parse(str(p))
    assert prob.kind == "complex" and prob.window == Window(-6, 0)
    assert prob.context().T.ngens == 1


def test_non_prime_rejected():
    with pytest.raises(ProblemError, match="p not prime") as exc:
        parse_obj({**MINIMAL, "field": {"type": "Fp", "p": 9}})
    assert exc.value.path == "$.field"


def test_module_with_d_squared_nonzero_cites_bidegree():
    bad = {**MINIMAL, "modules": {"M": {"dims": {"(0,0)": 1, "(1,0)": 1, "(2,0)": 1},
                                        "diff": {"(0,0)": [["1"]], "(1,0)": [["1"]]}}}}
    with pytest.raises(ProblemError, match=r"d\^2 = 0 violated at bidegree \(0, 0\)"):
        parse_obj(bad)


def test_schema_errors_have_paths():
    cases = [
        ({"field": {"type": "Q"}, "complex": {"ranks": {"0": 1}}}, "window"),
        ({**MINIMAL, "complex": {"ranks": {"-1": 1, "0": 1}, "diffs": {"-1": [["1", "2"]]}}},
         "$.complex.diffs"),
        ({**MINIMAL, "complex": {"ranks": {"1": 1}}}, "degrees <= 0"),
        ({**MINIMAL, "modules": {"M": {"dims": {"0,0": 1}}}}, "(i,j)"),
        ({**MINIMAL, "modules": {"M": {"dims": {"(0,0)": 1}, "actions": {"q": {}}}}}, "unknown generator"),
        ({**MINIMAL, "field": {"type": "Fq", "p": 5, "min_poly": [1, 0, 1]}}, "irreducible"),
        ({"field": {"type": "Q"}, "window": "0:2"}, "needs one of"),
    ]
    for obj, needle in cases:
        with pytest.raises(ProblemError) as exc:
            parse_obj(obj)
        assert needle in str(exc.value), (needle, str(exc.value))


def test_explicit_module_and_shift():
    obj = {**MINIMAL, "window": "0:4",
           "modules": {"M": {"dims": {"(0,0)": 1, "(0,2)": 1},
                             "actions": {"x0_0": {"(0,0)": [["1"]]}}},
                       "N": {"kind": "free", "shift": [1, 2]}}}
    prob = parse_obj(obj)
    M = prob.module("M")
    assert cohomology(M, Window(0, 4)).hilbert() == [(0, 0, 1), (0, 2, 1)]
    assert cohomology(prob.module("N"), Window(0, 4)).hilbert() == [(-1, 2, 1), (-1, 4, 1)]
    with pytest.raises(ProblemError, match="unknown module"):
        prob.module("nope")


@pytest.mark.parametrize("obj", [
    MINIMAL,
    {"field": {"type": "Fp", "p": 7}, "setup": {"dim_E": 2, "F1": [["1"], ["0"]], "F2": []},
     "window": "-8:0"},
    {"field": {"type": "Q"}, "window": "-10:0",
     "morphism": {"source": {"dim_E": 2, "F1": [[1], [0]], "F2": [[1], [0]]},
                  "target": {"dim_E": 2, "F1": [[1, 0], [0, 1]], "F2": [[1, 0], [0, 1]]},
                  "phi": [[1, 0], [0, 1]]}},
    {"field": {"type": "Fp", "p": 5}, "window": "-10:0",
     "complex": {"ranks": {"-1": 1, "0": 1}, "diffs": {"-1": [["1"]]}},
     "base_change": {"extension": {"type": "Fq", "p": 5, "min_poly": [2, 0, 1]}}},
    {**MINIMAL, "modules": {"M": {"dims": {"(0,0)": 1, "(1,0)": 1}, "diff": {"(0,0)": [["2"]]}}}},
], ids=["complex", "setup", "morphism", "base-change", "module"])
def test_roundtrip(obj):
    p = parse_obj(obj)
    q = parse_obj(json.loads(emit(p)))
    assert p == q
    assert emit(p) == emit(q)
