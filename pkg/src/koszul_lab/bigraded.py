"""Bigraded complexes, their cohomology, and maps between them.

Bidegrees are pairs (i, j): i cohomological, j internal. Every differential has
bidegree (1, 0), so a complex splits into one finite complex per internal
degree and all computations run one j at a time over a Window.

Anything exposing ``field``, ``degrees(j)``, ``dim(i, j)`` and ``d(i, j)`` can be
fed to :func:`cohomology`; lazily computed modules use this too.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field as dc_field
from typing import NamedTuple

from .linalg import Builder, Matrix, SpanTracker, hstack, image, kernel, rank


class Bidegree(NamedTuple):
    i: int
    j: int


class ComplexError(ValueError):
    pass


@dataclass(frozen=True)
class Window:
    j_min: int
    j_max: int

    def __post_init__(self):
        if self.j_min > self.j_max:
            raise ValueError(f"empty window {self.j_min}:{self.j_max}")

    def __iter__(self):
        return iter(range(self.j_min, self.j_max + 1))

    def __contains__(self, j):
        return self.j_min <= j <= self.j_max

    def __len__(self):
        return self.j_max - self.j_min + 1

    def __str__(self):
        return f"{self.j_min}:{self.j_max}"

    @classmethod
    def parse(cls, s: str):
        lo, hi = s.split(":")
        return cls(int(lo), int(hi))

    def to_json(self):
        return {"j_min": self.j_min, "j_max": self.j_max}


class BigradedComplex:
    """Finite bigraded complex given by explicit dimension and differential data."""

    def __init__(self, field, dims, diff=None, check=True):
        self.field = field
        self.dims = {Bidegree(*b): int(n) for b, n in dims.items() if n}
        self.diff = {}
        for b, m in (diff or {}).items():
            b = Bidegree(*b)
            if m.is_zero():
                continue
            if m.shape != (self.dim(b.i + 1, b.j), self.dim(*b)):
                raise ComplexError(f"differential block at {tuple(b)} has shape {m.shape}, "
                                   f"expected {(self.dim(b.i + 1, b.j), self.dim(*b))}")
            self.diff[b] = m
        self._degrees = {}
        for b in sorted(self.dims):
            self._degrees.setdefault(b.j, []).append(b.i)
        if check:
            bad = d_squared_violations(self, self.internal_degrees())
            if bad:
                raise ComplexError(f"d^2 != 0 at bidegree {bad[0]}")

    def dim(self, i, j):
        return self.dims.get((i, j), 0)

    def degrees(self, j):
        return self._degrees.get(j, [])

    def internal_degrees(self):
        return sorted(self._degrees)

    def d(self, i, j):
        m = self.diff.get((i, j))
        if m is None:
            return Matrix(self.field, self.dim(i + 1, j), self.dim(i, j))
        return m

    def __eq__(self, other):
        if not isinstance(other, BigradedComplex):
            return NotImplemented
        if self.field != other.field or self.dims != other.dims:
            return False
        keys = set(self.diff) | set(other.diff)
        return all(self.d(*b) == other.d(*b) for b in keys)

    @classmethod
    def materialize(cls, obj, w: Window, check=False):
        """Snapshot of a lazy complex-like object on the internal degrees of w."""
        dims, diff = {}, {}
        for j in w:
            for i in obj.degrees(j):
                dims[(i, j)] = obj.dim(i, j)
                if obj.dim(i + 1, j):
                    diff[(i, j)] = obj.d(i, j)
        return cls(obj.field, dims, diff, check=check)


def d_squared_violations(c, js):
    bad = []
    for j in js:
        for i in c.degrees(j):
            if c.dim(i + 1, j) and c.dim(i + 2, j):
                if not (c.d(i + 1, j) @ c.d(i, j)).is_zero():
                    bad.append(Bidegree(i, j))
    return bad


def euler_characteristic(c, j):
    return sum((-1) ** (i % 2) * c.dim(i, j) for i in c.degrees(j))


# ---- cohomology -----------------------------------------------------------


@dataclass
class CohomologyTable:
    dims: dict
    window: Window | None = None
    representatives: dict = dc_field(default_factory=dict)

    def __post_init__(self):
        self.dims = {Bidegree(*b): n for b, n in self.dims.items() if n}

    def __getitem__(self, b):
        return self.dims.get(tuple(b), 0)

    def __eq__(self, other):
        if not isinstance(other, CohomologyTable):
            return NotImplemented
        return self.dims == other.dims

    def total(self):
        return sum(self.dims.values())

    def hilbert(self):
        return hilbert(self)

    def restrict(self, w: Window):
        return CohomologyTable({b: n for b, n in self.dims.items() if b.j in w}, w)

    def reindex(self, fn, window=None):
        """Table with every entry moved from b to fn(b)."""
        return CohomologyTable({Bidegree(*fn(b)): n for b, n in self.dims.items()}, window)

    def shifted(self, n=0, m=0):
        """Table of X[n]<m> given the table of X: entry at (i, j) moves to (i - n, j + m)."""
        w = None if self.window is None else Window(self.window.j_min + m, self.window.j_max + m)
        return self.reindex(lambda b: (b.i - n, b.j + m), w)

    def scaled(self, k):
        return CohomologyTable({b: n * k for b, n in self.dims.items()}, self.window)

    def records(self):
        return [{"i": i, "j": j, "dim": d} for i, j, d in hilbert(self)]

    def to_json(self):
        return json.dumps(self.records())

    def to_csv(self):
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        wr.writerow(["i", "j", "dim"])
        for row in hilbert(self):
            wr.writerow(row)
        return buf.getvalue()

    def to_text(self):
        rows = hilbert(self)
        if not rows:
            return "(zero)\n"
        lines = [f"{'i':>5} {'j':>5} {'dim':>5}"]
        lines += [f"{i:>5} {j:>5} {d:>5}" for i, j, d in rows]
        return "\n".join(lines) + "\n"


def hilbert(t: CohomologyTable):
    """Sorted (i, j, dim) triples with zero entries dropped."""
    return sorted((b.i, b.j, n) for b, n in t.dims.items() if n)


def _ranks(c, j, check):
    degs = c.degrees(j)
    r = {}
    for i in degs:
        if c.dim(i + 1, j):
            r[i] = rank(c.d(i, j))
    if check:
        bad = d_squared_violations(c, [j])
        if bad:
            raise ComplexError(f"d^2 != 0 at bidegree {tuple(bad[0])}")
    return r


def cohomology(c, w: Window, representatives=False, check=True) -> CohomologyTable:
    dims, reps = {}, {}
    for j in w:
        degs = c.degrees(j)
        if not degs:
            continue
        r = _ranks(c, j, check)
        for i in degs:
            h = c.dim(i, j) - r.get(i, 0) - r.get(i - 1, 0)
            if h:
                dims[(i, j)] = h
                if representatives:
                    reps[Bidegree(i, j)] = cycle_representatives(c, i, j)
    return CohomologyTable(dims, w, reps)


def cycle_representatives(c, i, j) -> Matrix:
    """Columns are cycles whose classes form a basis of H^{i,j}."""
    z = kernel(c.d(i, j))
    span = SpanTracker(c.field)
    if c.dim(i - 1, j):
        for col in image(c.d(i - 1, j)).cols:
            span.add(col)
    chosen = [col for col in z.cols if span.add(col)]
    return Matrix(c.field, c.dim(i, j), len(chosen), chosen)


# ---- derived complexes ------------------------------------------------------


def shift(c: BigradedComplex, n: int) -> BigradedComplex:
    s = c.field.sign(n)
    dims = {(b.i - n, b.j): k for b, k in c.dims.items()}
    diff = {(b.i - n, b.j): m.scale(s) for b, m in c.diff.items()}
    return BigradedComplex(c.field, dims, diff, check=False)


def twist(c: BigradedComplex, m: int) -> BigradedComplex:
    dims = {(b.i, b.j + m): k for b, k in c.dims.items()}
    diff = {(b.i, b.j + m): x for b, x in c.diff.items()}
    return BigradedComplex(c.field, dims, diff, check=False)


class ComplexMap:
    """Degree (0, 0) map; ``blocks`` is a dict or a function (i, j) -> Matrix."""

    def __init__(self, source, target, blocks):
        self.source = source
        self.target = target
        self._fn = blocks if callable(blocks) else None
        self._blocks = {} if callable(blocks) else {Bidegree(*b): m for b, m in blocks.items()}
        self.field = source.field

    def block(self, i, j) -> Matrix:
        b = Bidegree(i, j)
        m = self._blocks.get(b)
        if m is None:
            rows, cols = self.target.dim(i, j), self.source.dim(i, j)
            if self._fn is None or not rows or not cols:
                m = Matrix(self.field, rows, cols)
            else:
                m = self._fn(i, j)
            if m.shape != (rows, cols):
                raise ComplexError(f"map block at {(i, j)} has shape {m.shape}, expected {(rows, cols)}")
            self._blocks[b] = m
        return m

    def chain_violations(self, w: Window):
        bad = []
        for j in w:
            degs = sorted(set(self.source.degrees(j)) | set(self.target.degrees(j)))
            for i in degs:
                lhs = self.target.d(i, j) @ self.block(i, j)
                rhs = self.block(i + 1, j) @ self.source.d(i, j)
                if lhs != rhs:
                    bad.append(Bidegree(i, j))
        return bad

    @classmethod
    def identity(cls, c):
        return cls(c, c, lambda i, j: Matrix.identity(c.field, c.dim(i, j)))

    @classmethod
    def zero(cls, source, target):
        return cls(source, target, {})


class Cone:
    """Mapping cone: C^i = S^{i+1} + T^i, d(s, t) = (-d s, f s + d t)."""

    def __init__(self, f: ComplexMap):
        self.f = f
        self.source = f.source
        self.target = f.target
        self.field = f.field

    def degrees(self, j):
        return sorted({i - 1 for i in self.source.degrees(j)} | set(self.target.degrees(j)))

    def dim(self, i, j):
        return self.source.dim(i + 1, j) + self.target.dim(i, j)

    def d(self, i, j):
        S, T, f = self.source, self.target, self.f
        b = Builder(self.field, S.dim(i + 2, j) + T.dim(i + 1, j), S.dim(i + 1, j) + T.dim(i, j))
        b.add_block(0, 0, S.d(i + 1, j), self.field.neg(self.field.one))
        b.add_block(S.dim(i + 2, j), 0, f.block(i + 1, j))
        b.add_block(S.dim(i + 2, j), S.dim(i + 1, j), T.d(i, j))
        return b.build()


def cone(f: ComplexMap):
    c = Cone(f)
    S, T = f.source, f.target
    if isinstance(S, BigradedComplex) and isinstance(T, BigradedComplex):
        js = sorted(set(S.internal_degrees()) | set(T.internal_degrees()))
        dims, diff = {}, {}
        for j in js:
            for i in c.degrees(j):
                dims[(i, j)] = c.dim(i, j)
                if c.dim(i + 1, j):
                    diff[(i, j)] = c.d(i, j)
        return BigradedComplex(f.field, dims, diff, check=True)
    return c


def induced_rank_defects(f: ComplexMap, w: Window):
    """Bidegrees where f fails to induce an isomorphism on cohomology."""
    S, T = f.source, f.target
    bad = []
    for j in w:
        degs = sorted(set(S.degrees(j)) | set(T.degrees(j)))
        if not degs:
            continue
        rs, rt = _ranks(S, j, False), _ranks(T, j, False)
        for i in degs:
            hs = S.dim(i, j) - rs.get(i, 0) - rs.get(i - 1, 0)
            ht = T.dim(i, j) - rt.get(i, 0) - rt.get(i - 1, 0)
            if hs != ht:
                bad.append(Bidegree(i, j))
                continue
            if hs == 0:
                continue
            z = kernel(S.d(i, j)) if S.dim(i + 1, j) else Matrix.identity(f.field, S.dim(i, j))
            fz = f.block(i, j) @ z
            bdry = T.d(i - 1, j)
            rb = rt.get(i - 1, 0)
            if rank(hstack(f.field, T.dim(i, j), [bdry, fz])) - rb != ht:
                bad.append(Bidegree(i, j))
    return bad


def is_quasi_iso(f: ComplexMap, w: Window) -> bool:
    return not induced_rank_defects(f, w)
