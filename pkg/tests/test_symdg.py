import random

import pytest
from hypothesis import given, settings, strategies as st

from koszul_lab.bigraded import Window, cohomology
from koszul_lab.fields import QQ, prime_field
from koszul_lab.linalg import Matrix
from koszul_lab.symdg import (GeneratorComplex, GeneratorError, GeneratorMap, build_algebra, build_Y,
                              random_generator_complex, regrade_xi, sym_morphism)

F3 = prime_field(3)


def rows(f, r):
    return Matrix.from_rows(f, r)


def test_build_Y_examples():
    Y = build_Y(GeneratorComplex(QQ, {0: 1}))
    assert Y.ranks == {1: 1} and Y.internal_degree == -2 and not Y.diffs
    Y = build_Y(GeneratorComplex(QQ, {-1: 1, 0: 1}, {-1: rows(QQ, [[1]])}))
    assert Y.ranks == {1: 1, 2: 1}
    assert Y.d(1) == rows(QQ, [[-1]])
    Y = build_Y(GeneratorComplex(QQ, {-1: 2, 0: 2}, {-1: rows(QQ, [[1, 0], [0, 2]])}))
    assert Y.d(1) == rows(QQ, [[-1, 0], [0, -2]])


@pytest.mark.parametrize("seed", range(10))
def test_build_Y_pairing(seed):
    """<d_Y y, v> = (-1)^|y| <y, d_X v> on basis vectors."""
    rng = random.Random(seed)
    X = random_generator_complex(QQ, rng, max_length=2, max_rank=2)
    Y = build_Y(X)
    for i in Y.degrees():
        # y in Y^i = (V^{1-i})^dual, d_Y y in (V^{-i})^dual, v in V^{-i}
        for a in range(Y.rank(i + 1)):
            for b in range(Y.rank(i)):
                lhs = Y.d(i)[a, b]
                rhs = (-1) ** i * X.d(-i)[b, a]
                assert lhs == rhs
        if Y.rank(i + 2):
            assert (Y.d(i + 1) @ Y.d(i)).is_zero()


def test_algebra_examples():
    T = build_algebra(GeneratorComplex(QQ, {0: 1}))
    assert [g.bidegree for g in T.generators] == [(0, 2)]
    assert all(T.dim(0, 2 * m) == 1 for m in range(6))
    E = build_algebra(GeneratorComplex(QQ, {-1: 1}))
    table = cohomology(E, Window(0, 8))
    assert table.hilbert() == [(-1, 2, 1), (0, 0, 1)]
    D = build_algebra(GeneratorComplex(QQ, {-2: 1, -1: 1}, {-2: rows(QQ, [[1]])}))
    x, y = D.generators
    assert x.bidegree == (-2, 2) and y.bidegree == (-1, 2)
    assert D.gen_diff[0] == {1: 1}


def test_monomial_examples():
    P = build_algebra(GeneratorComplex(QQ, {0: 1}))
    assert P.monomials(0, 6) == [(3,)]
    E2 = build_algebra(GeneratorComplex(QQ, {-1: 2}))
    assert E2.monomials(-2, 4) == [(1, 1)]
    S = build_algebra(build_Y(GeneratorComplex(QQ, {-1: 1, 0: 1})), 0, prefix="y")
    a = [g for g in S.generators if g.bidegree == (1, -2)]
    b = [g for g in S.generators if g.bidegree == (2, -2)]
    assert a and b
    assert len(S.monomials(3, -4)) == 1


def test_multiply_signs():
    E2 = build_algebra(GeneratorComplex(QQ, {-1: 2, 0: 1}))  # xi1, xi2 odd, x even
    xi1, xi2, x = (E2.gen_monomial(k) for k in range(3))
    par, m = E2.multiply(xi2, xi1)
    assert par == 1 and m == (1, 1, 0)
    assert E2.multiply(xi1, xi1) is None
    par, m = E2.multiply((1, 0, 1), xi2)
    assert par == 0 and m == (1, 1, 1)


def test_de_rham_differential():
    for f, cycle in ((QQ, False), (F3, True)):
        D = build_algebra(GeneratorComplex(f, {-2: 1, -1: 1}, {-2: rows(f, [[1]])}))
        assert D.diff((2, 0)) == {(1, 1): f(2)}
        assert (D.diff((3, 0)) == {}) == cycle
    E2 = build_algebra(GeneratorComplex(QQ, {-1: 2}))
    assert E2.diff((1, 1)) == {}


def test_generator_table_matches_regrade():
    X = GeneratorComplex(QQ, {-1: 1, 0: 2}, {-1: rows(QQ, [[1], [1]])})
    Y = build_Y(X)
    R1 = build_algebra(Y, 2)
    R2, xi = regrade_xi(build_algebra(Y, 0))
    assert R1.generator_table() == R2.generator_table()
    assert xi((1, -2)) == (-1, -2) and xi((2, -2)) == (0, -2) and xi((0, 0)) == (0, 0)


def test_sym_morphism():
    X = GeneratorComplex(QQ, {0: 1})
    assert sym_morphism(GeneratorMap(X, X, {0: Matrix.identity(QQ, 1)})).is_identity()
    zero = sym_morphism(GeneratorMap(X, X, {}))
    assert zero.apply((2,)) == {}
    assert zero.apply((0,)) == {(0,): 1}
    X2 = GeneratorComplex(QQ, {0: 2})
    inc = sym_morphism(GeneratorMap(X, X2, {0: rows(QQ, [[1], [0]])}))
    assert inc.apply((3,)) == {(3, 0): 1}


def test_sym_morphism_rejects_non_chain_map():
    X = GeneratorComplex(QQ, {-1: 1, 0: 1}, {-1: rows(QQ, [[1]])})
    with pytest.raises(GeneratorError):
        GeneratorMap(X, X, {0: Matrix.identity(QQ, 1)})


def test_internal_degree_zero_rejected():
    with pytest.raises(GeneratorError):
        build_algebra(GeneratorComplex(QQ, {0: 1}, internal_degree=0))


def _algebra(seed):
    rng = random.Random(seed)
    f = [QQ, prime_field(2), F3][seed % 3]
    return build_algebra(random_generator_complex(f, rng, max_length=2, max_rank=2)), rng


def _random_element(A, rng, c, t):
    f = A.field
    return {m: f.random(rng) for m in A.monomials(c, t) if rng.random() < 0.8}


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10 ** 6))
def test_associative_graded_commutative_leibniz(seed):
    A, rng = _algebra(seed)
    f = A.field
    picks = []
    for _ in range(3):
        t = rng.choice([t for t in (0, 2, 4) if A.degrees(t)])
        c = rng.choice(A.degrees(t))
        picks.append((c, _random_element(A, rng, c, t)))
    (ca, a), (cb, b), (_, c) = picks
    mul = A.mul_elements
    assert mul(mul(a, b), c) == mul(a, mul(b, c))
    ba = mul(b, a)
    if (ca * cb) % 2:
        ba = {m: f.neg(x) for m, x in ba.items()}
    assert mul(a, b) == ba
    lhs = A.diff_element(mul(a, b))
    r1 = mul(A.diff_element(a), b)
    r2 = mul(a, A.diff_element(b))
    rhs = dict(r1)
    for m, x in r2.items():
        y = f.neg(x) if ca % 2 else x
        rhs[m] = f.add(rhs.get(m, 0), y)
    assert lhs == {m: x for m, x in rhs.items() if x != 0}
    assert A.diff_element(A.diff_element(a)) == {}


def _series_dims(A, t):
    """Coefficient of q^t in prod 1/(1 - s^c q^t) (even) and (1 + s^c q^t) (odd)."""
    poly = {(0, 0): 1}
    for g in A.generators:
        new = {}
        for (c, tt), n in poly.items():
            e = 0
            while abs(tt + e * g.t) <= abs(t):
                key = (c + e * g.c, tt + e * g.t)
                new[key] = new.get(key, 0) + n
                e += 1
                if g.parity and e > 1:
                    break
        poly = new
    return {c: n for (c, tt), n in poly.items() if tt == t}


@pytest.mark.parametrize("seed", range(6))
def test_dims_match_generating_function(seed):
    A, _ = _algebra(seed)
    for t in range(0, 9, 2):
        assert {c: A.dim(c, t) for c in A.degrees(t)} == _series_dims(A, t)
