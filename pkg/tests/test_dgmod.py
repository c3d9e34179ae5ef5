import random

import pytest

from koszul_lab.bigraded import Window, cohomology, is_quasi_iso
from koszul_lab.dgmod import (ConeModule, DualModule, FiniteModule, ModuleError, SemiFreeModule,
                              ShiftedModule, WindowError, double_dual_map, dualize, extend_scalars,
                              free_module, identity_map, random_finite, random_semifree,
                              restrict_scalars, semifree_resolution, trivial_module, validate,
                              window_generation_check)
from koszul_lab.fields import QQ, prime_field
from koszul_lab.linalg import Matrix
from koszul_lab.symdg import GeneratorComplex, GeneratorMap, build_algebra, sym_morphism

F5 = prime_field(5)
W = Window(0, 8)


def poly(f=QQ, n=1):
    return build_algebra(GeneratorComplex(f, {0: n}))


def one(f=QQ):
    return Matrix.identity(f, 1)


def test_free_and_trivial_validate():
    A = build_algebra(GeneratorComplex(QQ, {-1: 1, 0: 1}, {-1: one()}))
    assert validate(free_module(A, [(0, 0), (1, 2)]), W) == []
    assert validate(trivial_module(A, {(0, 0): 1, (-1, 2): 1}), W) == []


def test_free_module_dims():
    A = build_algebra(GeneratorComplex(QQ, {-1: 1, 0: 1}))
    M = free_module(A, [(0, 0), (1, 2)])
    for i in range(-3, 3):
        for j in range(0, 8, 2):
            assert M.dim(i, j) == A.dim(i, j) + A.dim(i - 1, j - 2)
    P = free_module(poly(), [(0, 0)])
    assert all(P.dim(0, 2 * m) == 1 for m in range(6))


def test_leibniz_violation_reported():
    # x acts by 1 from (0,0) to (0,2) while d: (0,2) -> (1,2) is nonzero and gen_diff(x) = 0
    A = poly()
    M = FiniteModule(A, {(0, 0): 1, (0, 2): 1, (1, 2): 1}, {(0, 2): one()}, {0: {(0, 0): one()}})
    rep = validate(M, Window(0, 2))
    assert {"invariant": "Leibniz", "generator": A.generators[0].label, "bidegree": [0, 0]} in rep


def test_odd_square_reported():
    E = build_algebra(GeneratorComplex(QQ, {-1: 1}))
    M = FiniteModule(E, {(0, 0): 1, (-1, 2): 1, (-2, 4): 1},
                     actions={0: {(0, 0): one(), (-1, 2): one()}})
    assert any(r["invariant"] == "odd square" for r in validate(M, Window(0, 4)))


def test_dual_examples():
    A = poly()
    k = trivial_module(A, {(0, 0): 1})
    assert cohomology(dualize(k), Window(0, 0)).hilbert() == [(0, 0, 1)]
    T = free_module(A, [(0, 0)])
    D = dualize(T)
    for m in range(5):
        assert D.dim(0, -2 * m) == A.dim(0, 2 * m)
    assert validate(D, Window(-6, 0)) == []


@pytest.mark.parametrize("seed", range(6))
def test_double_dual(seed):
    rng = random.Random(seed)
    A = build_algebra(GeneratorComplex(QQ if seed % 2 else F5, {-1: 1, 0: 1}, {-1: one(QQ if seed % 2 else F5)}))
    M = random_finite(A, rng, span=4)
    w = Window(M.j_lo, M.j_hi)
    e = double_dual_map(M)
    assert e.violations(w) == []
    assert is_quasi_iso(e, w)


@pytest.mark.parametrize("seed", range(6))
def test_dual_of_random_module_valid(seed):
    rng = random.Random(seed)
    A = build_algebra(GeneratorComplex(QQ, {-1: 2, 0: 1}))
    M = random_finite(A, rng, span=3)
    assert validate(M, Window(M.j_lo, M.j_hi)) == []
    assert validate(dualize(M), Window(-M.j_hi, -M.j_lo)) == []


def test_koszul_resolution_of_k():
    A = poly()
    P, p = semifree_resolution(trivial_module(A, {(0, 0): 1}), W)
    assert sorted(P.gens) == [(-1, 2), (0, 0)]
    assert is_quasi_iso(p, W)
    # dims of Lambda(s) (x) k[x]
    assert cohomology(P, W).hilbert() == [(0, 0, 1)]
    assert P.dim(-1, 4) == 1 and P.dim(0, 4) == 1


def test_resolution_of_free_is_identity():
    T = free_module(poly(), [(0, 0)])
    P, p = semifree_resolution(T, W)
    assert P is T


@pytest.mark.parametrize("seed", range(5))
def test_resolution_random(seed):
    rng = random.Random(seed)
    A = build_algebra(GeneratorComplex(QQ, {-1: 1, 0: 1}))
    M = random_finite(A, rng, span=4)
    P, p = semifree_resolution(M, W)
    assert p.violations(W) == []
    assert cohomology(P, W) == cohomology(M, W)
    assert validate(P, Window(0, 4)) == []


def test_resolution_outside_window():
    A = poly()
    P, _ = semifree_resolution(trivial_module(A, {(0, 0): 1}), Window(0, 4))
    with pytest.raises(WindowError) as exc:
        P.degrees(10)
    assert exc.value.required is not None


def test_restriction_along_inclusion():
    X1, X2 = GeneratorComplex(QQ, {0: 1}), GeneratorComplex(QQ, {0: 2})
    phi = sym_morphism(GeneratorMap(X1, X2, {0: Matrix.from_rows(QQ, [[1], [0]])}))
    big = free_module(phi.target, [(0, 0)])
    R = restrict_scalars(phi, big)
    assert [R.dim(0, 2 * m) for m in range(5)] == [1, 2, 3, 4, 5]
    assert cohomology(R, W) == cohomology(big, W)
    assert validate(R, W) == []
    E = extend_scalars(phi, free_module(phi.source, [(0, 0)]))
    assert [E.dim(0, 2 * m) for m in range(5)] == [1, 2, 3, 4, 5]


def test_restriction_along_identity():
    X = GeneratorComplex(QQ, {-1: 1, 0: 1}, {-1: one()})
    phi = sym_morphism(GeneratorMap(X, X, {-1: one(), 0: one()}))
    M = random_finite(phi.target, random.Random(3), span=3)
    R = restrict_scalars(phi, M)
    w = Window(M.j_lo, M.j_hi)
    assert all(R.act(k, i, j) == M.act(k, i, j) for j in w for i in M.degrees(j)
               for k in range(phi.source.ngens))


def test_extend_needs_semifree():
    X = GeneratorComplex(QQ, {0: 1})
    phi = sym_morphism(GeneratorMap(X, X, {0: one()}))
    with pytest.raises(ModuleError):
        extend_scalars(phi, trivial_module(phi.source, {(0, 0): 1}))


def test_extension_of_quasi_isomorphic_inputs():
    """L phi^* of k and of its resolution agree."""
    X1, X2 = GeneratorComplex(QQ, {0: 1}), GeneratorComplex(QQ, {0: 2})
    phi = sym_morphism(GeneratorMap(X1, X2, {0: Matrix.from_rows(QQ, [[1], [0]])}))
    k = trivial_module(phi.source, {(0, 0): 1})
    a = extend_scalars(phi, k, W)
    b = extend_scalars(phi, semifree_resolution(k, Window(0, 10))[0])
    assert cohomology(a, W) == cohomology(b, W)
    assert cohomology(a, W).hilbert() == [(0, 2 * m, 1) for m in range(5)]


def test_shift_and_cone_modules():
    A = build_algebra(GeneratorComplex(QQ, {-1: 1, 0: 1}, {-1: one()}))
    M = random_finite(A, random.Random(8), span=3)
    w = Window(M.j_lo - 4, M.j_hi + 4)
    S = ShiftedModule(M, 1, 2)
    assert validate(S, w) == []
    assert cohomology(S, w) == cohomology(M, w).shifted(1, 2).restrict(w)
    C = ConeModule(identity_map(M))
    assert validate(C, w) == []
    assert cohomology(C, w).dims == {}


def test_generation_examples():
    A = poly()
    T = free_module(A, [(0, 0)])
    assert window_generation_check(T, Window(0, 0), Window(0, 8))
    # one trivial generator in every internal degree: never finitely generated
    inf = trivial_module(A, {(0, 2 * m): 1 for m in range(8)})
    assert not window_generation_check(inf, Window(0, 4), Window(0, 14))
    assert window_generation_check(inf, Window(0, 14), Window(0, 14))


def test_semifree_diff_checked():
    A = poly()
    with pytest.raises(ModuleError):
        # d(e1) = e0 would lower the internal degree
        SemiFreeModule(A, [(0, 0), (0, 2)], [{}, {((0,), 0): QQ.one}])


def test_random_semifree_is_valid():
    A = build_algebra(GeneratorComplex(F5, {-1: 1, 0: 2}))
    for seed in range(5):
        P = random_semifree(A, random.Random(seed))
        assert validate(P, Window(0, 6)) == []
