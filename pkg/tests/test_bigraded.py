import random

import pytest

from koszul_lab.bigraded import (BigradedComplex, CohomologyTable, ComplexError, ComplexMap, Window,
                                 cohomology, cone, euler_characteristic, hilbert, is_quasi_iso,
                                 shift, twist)
from koszul_lab.fields import QQ, prime_field
from koszul_lab.linalg import Matrix, kernel

F2 = prime_field(2)


def one(f, x=1):
    return Matrix.from_rows(f, [[x]])


def test_zero_differential_table_is_dims():
    c = BigradedComplex(QQ, {(0, 0): 2, (1, 0): 1, (-1, 4): 3})
    assert cohomology(c, Window(0, 4)).dims == c.dims


def test_identity_complex_acyclic():
    c = BigradedComplex(QQ, {(0, 2): 1, (1, 2): 1}, {(0, 2): one(QQ)})
    assert cohomology(c, Window(0, 4)).dims == {}


def test_d_squared_rejected():
    with pytest.raises(ComplexError, match="d\\^2"):
        BigradedComplex(QQ, {(0, 0): 1, (1, 0): 1, (2, 0): 1}, {(0, 0): one(QQ), (1, 0): one(QQ)})


def test_bad_block_shape():
    with pytest.raises(ComplexError, match="shape"):
        BigradedComplex(QQ, {(0, 0): 1, (1, 0): 2}, {(0, 0): one(QQ)})


def test_window_rejects_reversed():
    with pytest.raises(ValueError):
        Window(2, 1)
    assert str(Window.parse("-3:4")) == "-3:4"


def test_hilbert_examples():
    assert hilbert(CohomologyTable({})) == []
    assert hilbert(CohomologyTable({(0, 0): 1})) == [(0, 0, 1)]
    # exterior algebra on one odd generator
    assert hilbert(CohomologyTable({(0, 0): 1, (-1, 2): 1})) == [(-1, 2, 1), (0, 0, 1)]


def random_complex(f, rng, js=(0, 2), degs=(-1, 0, 1)):
    """d built from kernels so that d^2 = 0."""
    dims, diff = {}, {}
    for j in js:
        for i in degs:
            dims[(i, j)] = rng.randint(0, 3)
        for i in reversed(degs[:-1]):
            src, tgt = dims[(i, j)], dims[(i + 1, j)]
            if not src or not tgt:
                continue
            nxt = diff.get((i + 1, j))
            basis = kernel(nxt) if nxt is not None else Matrix.identity(f, tgt)
            cols = []
            for _ in range(src):
                v = {}
                for col in basis.cols:
                    a = f.random(rng)
                    for r, x in col.items():
                        v[r] = f.add(v.get(r, 0), f.mul(a, x))
                cols.append(v)
            diff[(i, j)] = Matrix.from_columns(f, tgt, cols)
    return BigradedComplex(f, dims, diff)


@pytest.mark.parametrize("seed", range(8))
def test_euler_characteristic_preserved(seed):
    rng = random.Random(seed)
    c = random_complex(QQ if seed % 2 else F2, rng)
    t = cohomology(c, Window(0, 2))
    for j in (0, 2):
        chi = sum((-1) ** (b.i % 2) * n for b, n in t.dims.items() if b.j == j)
        assert chi == euler_characteristic(c, j)


@pytest.mark.parametrize("seed", range(5))
def test_window_soundness(seed):
    c = random_complex(QQ, random.Random(seed))
    full = cohomology(c, Window(0, 2))
    assert full.restrict(Window(2, 2)) == cohomology(c, Window(2, 2))


@pytest.mark.parametrize("seed", range(5))
def test_shift_and_twist(seed):
    c = random_complex(QQ, random.Random(seed))
    w = Window(0, 2)
    assert shift(c, 0) == c
    assert shift(shift(c, 1), -1) == c
    assert twist(c, 0) == c
    h = cohomology(c, w)
    h2 = cohomology(shift(c, 2), w)
    assert all(h2[(i, j)] == h[(i + 2, j)] for i in range(-4, 4) for j in w)
    ht = cohomology(twist(c, 3), Window(3, 5))
    assert all(ht[(i, j)] == h[(i, j - 3)] for i in range(-2, 3) for j in range(3, 6))
    assert twist(shift(c, 1), 2) == shift(twist(c, 2), 1)


def test_cone_examples():
    c = BigradedComplex(QQ, {(0, 0): 1})
    assert cohomology(cone(ComplexMap.identity(c)), Window(0, 0)).dims == {}
    zero_target = BigradedComplex(QQ, {})
    assert cone(ComplexMap.zero(c, zero_target)) == shift(c, 1)
    for f, expect in ((QQ, {}), (F2, {(-1, 0): 1, (0, 0): 1})):
        k = BigradedComplex(f, {(0, 0): 1})
        m = ComplexMap(k, k, {(0, 0): one(f, 2)})
        assert cohomology(cone(m), Window(0, 0)).dims == expect


def test_quasi_iso_examples():
    c = BigradedComplex(QQ, {(0, 0): 1, (0, 2): 2})
    assert is_quasi_iso(ComplexMap.identity(c), Window(0, 2))
    assert not is_quasi_iso(ComplexMap.zero(c, c), Window(0, 2))


@pytest.mark.parametrize("seed", range(10))
def test_cone_acyclic_iff_quasi_iso(seed):
    rng = random.Random(seed)
    f = QQ if seed % 2 else F2
    k = BigradedComplex(f, {(0, 0): 2, (1, 0): 1})
    blocks = {(0, 0): Matrix.from_rows(f, [[f.random(rng) for _ in range(2)] for _ in range(2)]),
              (1, 0): Matrix.from_rows(f, [[f.random(rng)]])}
    m = ComplexMap(k, k, blocks)
    acyclic = not cohomology(cone(m), Window(0, 0)).dims
    assert acyclic == is_quasi_iso(m, Window(0, 0))


def test_table_exports():
    t = CohomologyTable({(0, 0): 1, (-1, 2): 2})
    assert t.to_csv() == "i,j,dim\n-1,2,2\n0,0,1\n"
    assert t.records()[0] == {"i": -1, "j": 2, "dim": 2}
    assert t.shifted(1, 2).dims == {(-1, 2): 1, (-2, 4): 2}
