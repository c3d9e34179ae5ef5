"""Verification suites. Each returns {"check", "window", "pass", "witnesses"}.

Witnesses list the offending cases on failure and the decisive evidence on success.
Everything is driven by a seed, so reports are reproducible byte for byte.
"""

from __future__ import annotations

import random

from .bigraded import CohomologyTable, Window, cohomology, is_quasi_iso
from .dgmod import (ConeModule, DualModule, ShiftedModule, double_dual_map, identity_map,
                    random_finite, random_semifree, semifree_resolution, validate,
                    window_generation_check)
from .fields import QQ, extension_field, prime_field
from .geometry import (BaseChangeSetup, BundleMorphismSetup, SubbundleSetup, base_change_functors,
                       check_base_change_compat, check_morphism_compat,
                       derived_intersection_cohomology, exchange_report, phi_functors, tor_oracle)
from .koszul import (KoszulContext, counit, functor_A, functor_B, kappa, kappa_inv, koszul_K1,
                     koszul_K2, unit)
from .linalg import Matrix, image
from .symdg import GeneratorComplex, build_algebra, random_generator_complex

F2, F5, F7 = prime_field(2), prime_field(5), prime_field(7)
POINT = CohomologyTable({(0, 0): 1})


def _rng(seed, name):
    return random.Random(f"{seed}:{name}")


def _report(check, w, ok, witnesses):
    return {"check": check, "window": str(w) if w is not None else None, "pass": bool(ok),
            "witnesses": witnesses}


def _ctx_label(X):
    return {"field": str(X.field), "complex": X.to_json()}


# ---- Koszul acyclicity -----------------------------------------------------------------


def koszul_acyclicity(seed=0, count=20, fields=(QQ, F2, F7), w=Window(-12, 0), extra=()):
    rng = _rng(seed, "acyclicity")
    bad = []
    cases = 0
    for fld in fields:
        for _ in range(count):
            X = random_generator_complex(fld, rng, max_length=2, max_rank=2)
            bad += _acyclicity_case(X, w)
            cases += 1
    for X in extra:
        bad += _acyclicity_case(X, w)
        cases += 1
    wit = bad if bad else [{"cases": cases, "table": [[0, 0, 1]]}]
    return _report("koszul-acyclicity", w, not bad, wit)


def _acyclicity_case(X, w):
    ctx = KoszulContext(X)
    K1, aug = koszul_K1(ctx)
    K2, coaug = koszul_K2(ctx)
    out = []
    for name, K, f in (("K1", K1, aug), ("K2", K2, coaug)):
        t = cohomology(K, w, check=False)
        if t != POINT or not is_quasi_iso(f, w):
            out.append({**_ctx_label(X), "module": name, "table": t.hilbert()})
    return out


# ---- the characteristic p de Rham example -----------------------------------------------


def de_rham_complex(fld):
    return GeneratorComplex(fld, {-2: 1, -1: 1}, {-2: Matrix.identity(fld, 1)})


def char_p_cohomology(seed=0, w=Window(0, 8)):
    expected = {str(prime_field(3)): [(-6, 6, 1), (-5, 6, 1), (0, 0, 1)], "Q": [(0, 0, 1)]}
    got = {}
    for fld in (prime_field(3), QQ):
        got[str(fld)] = cohomology(build_algebra(de_rham_complex(fld)), w).hilbert()
    ok = got == expected
    return _report("char-p-cohomology", w, ok, {k: [list(x) for x in v] for k, v in got.items()})


# ---- unit and counit ------------------------------------------------------------------------


def unit_counit_corpus(ctx, rng):
    """(name, T-module) and (name, S-module) lists, all with internal degrees bounded above."""
    T_side = [
        ("k", ctx.trivial("T")),
        ("T_dual", ctx.T_dual()),
        ("cone(id T_dual)", ConeModule(identity_map(ctx.T_dual()))),
        ("T_dual[1]<-2>", ShiftedModule(ctx.T_dual(), 1, -2)),
        ("dual of random semi-free", DualModule(random_semifree(ctx.T, rng, ngens=2))),
        ("random finite", random_finite(ctx.T, rng, span=4, j_range=(-4, 0))),
    ]
    S_side = [
        ("k", ctx.trivial("S")),
        ("S", ctx.free("S")),
        ("cone(id S)", ConeModule(identity_map(ctx.free("S")))),
        ("A(k)", functor_A(ctx, ctx.trivial("T"))),
        ("random semi-free", random_semifree(ctx.S, rng, ngens=2, j_range=(-2, 0))),
        ("random finite", random_finite(ctx.S, rng, span=4, j_range=(-2, 0))),
    ]
    return T_side, S_side


def unit_counit_complexes(fld):
    return [
        GeneratorComplex(fld, {0: 1}),
        GeneratorComplex(fld, {-1: 1, 0: 1}, {-1: Matrix.identity(fld, 1)}),
        GeneratorComplex(fld, {-1: 1, 0: 1}),
    ]


def unit_counit(seed=0, fields=(QQ, F5), w=Window(-12, 0), map_window=Window(-6, 0), extra=()):
    rng = _rng(seed, "unit-counit")
    bad, cases = [], 0
    contexts = [X for fld in fields for X in unit_counit_complexes(fld)] + list(extra)
    for X in contexts:
        ctx = KoszulContext(X)
        T_side, S_side = unit_counit_corpus(ctx, rng)
        for kind, corpus, make in (("unit", T_side, unit), ("counit", S_side, counit)):
            for name, M in corpus:
                f = make(ctx, M)
                cases += 1
                viol = f.violations(map_window)
                if viol or not is_quasi_iso(f, w):
                    bad.append({**_ctx_label(X), "map": kind, "module": name,
                                "violations": [[v[0], list(v[1])] for v in viol[:3]]})
    return _report("unit-counit", w, not bad, bad or [{"maps checked": cases}])


# ---- double duality -------------------------------------------------------------------------


def duality_involution(seed=0, count=10):
    rng = _rng(seed, "involution")
    bad = []
    fields = (QQ, F2, F5)
    for n in range(count):
        fld = fields[n % len(fields)]
        X = random_generator_complex(fld, rng, max_length=1, max_rank=2)
        ctx = KoszulContext(X)
        A = ctx.T if n % 2 == 0 else ctx.S
        M = random_finite(A, rng, span=4, j_range=(0, 2) if A is ctx.T else (-2, 0))
        w = Window(M.j_lo, M.j_hi)
        e = double_dual_map(M)
        viol = e.violations(w)
        dual_report = validate(DualModule(M), Window(-M.j_hi, -M.j_lo))
        if viol or dual_report or not is_quasi_iso(e, w):
            bad.append({**_ctx_label(X), "case": n, "violations": len(viol),
                        "dual invalid": len(dual_report)})
    return _report("duality-involution", None, not bad, bad or [{"modules": count}])


# ---- degree formula -----------------------------------------------------------------------------


def degree_formula(seed=0, w=Window(-10, 0), X=None):
    rng = _rng(seed, "degree-formula")
    X = X or GeneratorComplex(QQ, {-1: 1, 0: 1})
    ctx = KoszulContext(X)
    modules = [("T", ctx.free("T")), ("k", ctx.trivial("T")),
               ("random finite", random_finite(ctx.T, rng, span=4, j_range=(0, 2)))]
    bad, cases = [], 0
    for name, M in modules:
        for n in range(-2, 3):
            for m in range(-2, 3):
                lhs = cohomology(kappa(ctx, ShiftedModule(M, n, m)), w, check=False)
                a, b = -n + m, -m
                base = cohomology(kappa(ctx, M), Window(w.j_min - b, w.j_max - b), check=False)
                rhs = base.shifted(a, b).restrict(w)
                cases += 1
                if lhs != rhs:
                    bad.append({"module": name, "n": n, "m": m, "lhs": lhs.hilbert(),
                                "rhs": rhs.hilbert()})
    return _report("degree-formula", w, not bad, bad or [{"cases": cases}])


# ---- derived intersections ------------------------------------------------------------------------


def canonical_setups(fld):
    def cols(n, rows):
        return Matrix.from_rows(fld, rows) if rows else Matrix(fld, n, 0)
    return {
        "transversal": SubbundleSetup(fld, 2, cols(2, [[1], [0]]), cols(2, [[0], [1]])),
        "self-intersection of origin": SubbundleSetup(fld, 1, cols(1, []), cols(1, [])),
        "coincident lines": SubbundleSetup(fld, 2, cols(2, [[1], [0]]), cols(2, [[1], [0]])),
        "F1 = E, F2 = 0": SubbundleSetup(fld, 1, cols(1, [[1]]), cols(1, [])),
    }


def random_subspace(fld, rng, n):
    r = rng.randint(0, n)
    m = Matrix.from_columns(fld, n, [{k: fld.random(rng) for k in range(n)} for _ in range(r)])
    return image(m) if r else Matrix(fld, n, 0)


def random_setup(fld, rng, max_dim=3):
    n = rng.randint(1, max_dim)
    return SubbundleSetup(fld, n, random_subspace(fld, rng, n), random_subspace(fld, rng, n))


def derived_intersection(seed=0, count=20, w=Window(-10, 0)):
    """Tables on w and on its reflection, since these tables live in j >= 0."""
    rng = _rng(seed, "intersection")
    mirror = Window(-w.j_max, -w.j_min)
    bad, cases = [], 0
    setups = list(canonical_setups(QQ).items())
    fields = (QQ, F2, F7)
    for n in range(count):
        setups.append((f"random {n}", random_setup(fields[n % 3], rng)))
    for name, s in setups:
        for win in (w, mirror):
            a = derived_intersection_cohomology(s, win)
            b = tor_oracle(s, win)
            cases += 1
            if a != b:
                bad.append({"setup": name, "window": str(win), "T": a.hilbert(), "oracle": b.hilbert()})
    return _report("derived-intersection", w, not bad, bad or [{"comparisons": cases}])


# ---- free/trivial exchange ---------------------------------------------------------------------------


def exchange(seed=0, w=Window(-10, 0)):
    s = canonical_setups(QQ)["self-intersection of origin"]
    from .geometry import build_X_lkd
    ctx = KoszulContext(build_X_lkd(s))
    pos = Window(-w.j_max, -w.j_min)
    poly = CohomologyTable({(0, j): 1 for j in w if j % 2 == 0})
    res = {}
    res["kappa(T) = k"] = cohomology(kappa(ctx, ctx.free("T")), w, check=False) == POINT
    res["kappa(k) = H(R)"] = (cohomology(kappa(ctx, ctx.trivial("T")), w, check=False)
                              == cohomology(ctx.free("R"), w) == poly)
    res["kappa_inv(k) = T"] = (cohomology(kappa_inv(ctx, ctx.trivial("R")), pos, check=False)
                               == cohomology(ctx.free("T"), pos))
    res["kappa_inv(R) = k"] = cohomology(kappa_inv(ctx, ctx.free("R")), pos, check=False) == POINT
    for name, st in canonical_setups(QQ).items():
        for k, v in exchange_report(st, w).items():
            res[f"{name}: {k}"] = v["pass"]
    return _report("exchange", w, all(res.values()), [{k: v} for k, v in res.items()])


# ---- finite generation -----------------------------------------------------------------------------------


def fg_corpus(ctx, rng):
    """fg modules whose generators sit in at most two adjacent internal degrees."""
    return [
        ("T", ctx.free("T")),
        ("k", ctx.trivial("T")),
        ("T[1]<2>", ShiftedModule(ctx.free("T"), 1, 2)),
        ("T + T<1>", random_semifree(ctx.T, rng, ngens=2, i_range=(0, 0), j_range=(0, 1),
                                      density=0.0)),
        ("random semi-free", random_semifree(ctx.T, rng, ngens=3, j_range=(0, 1))),
    ]


def wide_corpus(ctx, rng):
    """fg modules whose kappa has generators spread over several internal degrees.

    kappa of a finite module has generators at both ends of its support.
    """
    return [
        ("random semi-free, wide", random_semifree(ctx.T, rng, ngens=3, j_range=(0, 4))),
        ("random finite", random_finite(ctx.T, rng, span=4, j_range=(0, 1))),
        ("random finite, wide", random_finite(ctx.T, rng, span=4, j_range=(0, 2))),
    ]


def generation_windows(M, depth=1, search=16, extend=6):
    """Occupied internal degrees within ``depth`` of the top one, and a window 6 further.

    depth=1 gives the two degrees nearest the bounded end.
    """
    top = M.j_hi
    t = cohomology(M, Window(top - search, top), check=False)
    occupied = sorted({b.j for b in t.dims}, reverse=True)
    if not occupied:
        return None, None
    near = [j for j in occupied if j >= occupied[0] - depth]
    gen = Window(min(near), max(near))
    return gen, Window(gen.j_min - extend, gen.j_max)


def fg_preservation(seed=0, wide_depth=6):
    rng = _rng(seed, "fg")
    complexes = [
        GeneratorComplex(QQ, {0: 1}),
        GeneratorComplex(QQ, {-1: 1}),
        GeneratorComplex(QQ, {-1: 1, 0: 1}, {-1: Matrix.identity(QQ, 1)}),
        GeneratorComplex(F5, {-1: 1, 0: 2}),
        GeneratorComplex(F2, {-1: 2, 0: 1}, {-1: Matrix.from_rows(F2, [[1, 1]])}),
    ]
    bad, cases = [], 0
    for X in complexes:
        ctx = KoszulContext(X)
        runs = [(m, 1) for m in fg_corpus(ctx, rng)] + [(m, wide_depth) for m in wide_corpus(ctx, rng)]
        for (name, M), depth in runs:
            K = kappa(ctx, M)
            gen, test = generation_windows(K, depth)
            cases += 1
            if gen is None:
                continue
            if not window_generation_check(K, gen, test):
                bad.append({**_ctx_label(X), "module": name, "gen_window": str(gen),
                            "test_window": str(test)})
    return _report("fg-preservation", None, not bad,
                   bad or [{"modules": cases, "status": "window-verified"}])


# ---- morphisms -----------------------------------------------------------------------------------------------


def morphism_example(fld=QQ):
    e1 = Matrix.from_rows(fld, [[1], [0]])
    E = Matrix.identity(fld, 2)
    return BundleMorphismSetup(SubbundleSetup(fld, 2, e1, e1), SubbundleSetup(fld, 2, E, E), E)


def morphism_compat(seed=0, w=Window(-10, 0)):
    b = morphism_example()
    data = phi_functors(b)
    checks = []
    for name in ("free", "trivial"):
        M = data.ctx.free("T") if name == "free" else data.ctx.trivial("T")
        Mp = data.ctx_p.free("T") if name == "free" else data.ctx_p.trivial("T")
        r = check_morphism_compat(b, w, M, Mp, data)
        for c in r["checks"]:
            checks.append({"module": name, "check": c["check"], "pass": c["pass"],
                           "table": [[x["i"], x["j"], x["dim"]] for x in c["lhs"]]})
    return _report("morphism-compat", w, all(c["pass"] for c in checks), checks)


# ---- base change ----------------------------------------------------------------------------------------------


def base_change(seed=0, w=Window(-10, 0)):
    F25 = extension_field(5, [2, 0, 1])
    bc = BaseChangeSetup(F5, F25)
    checks = []
    for X in (GeneratorComplex(F5, {-1: 1, 0: 1}, {-1: Matrix.identity(F5, 1)}),
              GeneratorComplex(F5, {-1: 1, 0: 1})):
        data = base_change_functors(bc, X)
        pairs = [("free / trivial", data.ctx_Y.free("T"), data.ctx_X.trivial("T")),
                 ("trivial / free", data.ctx_Y.trivial("T"), data.ctx_X.free("T"))]
        for name, M, N in pairs:
            r = check_base_change_compat(data, w, M, N)
            for c in r["checks"]:
                checks.append({"complex": X.to_json(), "modules": name, "check": c["check"],
                               "pass": c["pass"]})
    return _report("base-change", w, all(c["pass"] for c in checks), checks)


# ---- extras -----------------------------------------------------------------------------------------------------


def exactness(seed=0, w=Window(-10, 0)):
    """A and B send acyclic modules to acyclic modules."""
    rng = _rng(seed, "exactness")
    bad, cases = [], 0
    for X in unit_counit_complexes(QQ) + unit_counit_complexes(F5):
        ctx = KoszulContext(X)
        T_in = [ConeModule(identity_map(ctx.T_dual())),
                ConeModule(identity_map(random_finite(ctx.T, rng, span=4, j_range=(-4, 0))))]
        S_in = [ConeModule(identity_map(ctx.free("S"))),
                ConeModule(identity_map(random_semifree(ctx.S, rng, ngens=2, j_range=(-2, 0))))]
        for M in T_in:
            cases += 1
            if cohomology(functor_A(ctx, M), w, check=False).dims:
                bad.append({**_ctx_label(X), "functor": "A"})
        for N in S_in:
            cases += 1
            if cohomology(functor_B(ctx, N), w, check=False).dims:
                bad.append({**_ctx_label(X), "functor": "B"})
    return _report("exactness", w, not bad, bad or [{"acyclic inputs": cases}])


def resolutions(seed=0, count=6):
    rng = _rng(seed, "resolution")
    bad = []
    for n in range(count):
        X = random_generator_complex(QQ if n % 2 else F5, rng, max_length=1, max_rank=2)
        ctx = KoszulContext(X)
        side = ctx.T if n % 2 == 0 else ctx.R
        M = random_finite(side, rng, span=4, j_range=(0, 2) if side is ctx.T else (-2, 0))
        w = Window(M.j_lo, M.j_lo + 8) if side is ctx.T else Window(M.j_hi - 8, M.j_hi)
        P, p = semifree_resolution(M, w)
        if p.violations(w) or not is_quasi_iso(p, w):
            bad.append({**_ctx_label(X), "case": n})
    return _report("resolution", None, not bad, bad or [{"modules": count}])


SUITES = {
    "koszul-acyclicity": koszul_acyclicity,
    "char-p-cohomology": char_p_cohomology,
    "unit-counit": unit_counit,
    "duality-involution": duality_involution,
    "degree-formula": degree_formula,
    "derived-intersection": derived_intersection,
    "exchange": exchange,
    "fg-preservation": fg_preservation,
    "morphism-compat": morphism_compat,
    "base-change": base_change,
    "exactness": exactness,
    "resolution": resolutions,
}


def run_suites(names, seed=0, problem=None):
    """Run the named suites (or all); a problem file adds its own complex where it applies."""
    if names in (None, "all", ["all"]):
        names = list(SUITES)
    reports = []
    extra = ()
    if problem is not None and problem.kind in ("complex", "setup"):
        extra = (problem.context().X,)
    for name in names:
        if name not in SUITES:
            raise KeyError(name)
        fn = SUITES[name]
        if extra and name in ("koszul-acyclicity", "unit-counit"):
            reports.append(fn(seed, extra=extra))
        else:
            reports.append(fn(seed))
    return {"seed": seed, "suites": reports, "pass": all(r["pass"] for r in reports)}
