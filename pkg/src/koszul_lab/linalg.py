"""Sparse exact matrices and Gaussian elimination.

A Matrix stores its columns as dicts ``row -> nonzero entry``. Differential and
action blocks are extremely sparse, so elimination works directly on these dicts
with a deterministic pivot rule (lowest index first).
"""

from __future__ import annotations

from .fields import PRIME, RATIONALS, FieldSpec


class Matrix:
    __slots__ = ("field", "nrows", "ncols", "cols")

    def __init__(self, field: FieldSpec, nrows: int, ncols: int, cols=None):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        if cols is None:
            cols = [{} for _ in range(ncols)]
        self.cols = cols

    # ---- constructors ------------------------------------------------

    @classmethod
    def zeros(cls, field, nrows, ncols):
        return cls(field, nrows, ncols)

    @classmethod
    def identity(cls, field, n):
        one = field.one
        return cls(field, n, n, [{k: one} for k in range(n)])

    @classmethod
    def from_rows(cls, field, rows, ncols=None):
        rows = [list(r) for r in rows]
        if ncols is None:
            ncols = len(rows[0]) if rows else 0
        cols = [{} for _ in range(ncols)]
        for r, row in enumerate(rows):
            if len(row) != ncols:
                raise ValueError("ragged matrix rows")
            for c, x in enumerate(row):
                x = field.parse(x) if not field.contains(x) else x
                if x != 0:
                    cols[c][r] = x
        return cls(field, len(rows), ncols, cols)

    @classmethod
    def from_columns(cls, field, nrows, vectors):
        cols = [{r: x for r, x in v.items() if x != 0} for v in vectors]
        return cls(field, nrows, len(cols), cols)

    @classmethod
    def scalar(cls, field, n, c):
        if c == 0:
            return cls(field, n, n)
        return cls(field, n, n, [{k: c} for k in range(n)])

    # ---- access ------------------------------------------------------

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, rc):
        r, c = rc
        return self.cols[c].get(r, self.field.zero)

    def to_rows(self):
        z = self.field.zero
        rows = [[z] * self.ncols for _ in range(self.nrows)]
        for c, col in enumerate(self.cols):
            for r, x in col.items():
                rows[r][c] = x
        return rows

    def row_dicts(self):
        rows = [{} for _ in range(self.nrows)]
        for c, col in enumerate(self.cols):
            for r, x in col.items():
                rows[r][c] = x
        return rows

    def nnz(self):
        return sum(len(c) for c in self.cols)

    def is_zero(self):
        return not any(self.cols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __repr__(self):
        f = self.field.format
        body = "; ".join(" ".join(f(x) for x in row) for row in self.to_rows())
        return f"Matrix({self.nrows}x{self.ncols}: {body})"

    def serialize(self):
        f = self.field.format
        return [[f(x) for x in row] for row in self.to_rows()]

    # ---- algebra -----------------------------------------------------

    def transpose(self):
        return Matrix(self.field, self.ncols, self.nrows, self.row_dicts())

    T = property(transpose)

    def __add__(self, other):
        _check_shape(self, other)
        add = self.field.add
        cols = []
        for a, b in zip(self.cols, other.cols):
            c = dict(a)
            for r, x in b.items():
                y = add(c.get(r, 0), x)
                if y != 0:
                    c[r] = y
                else:
                    c.pop(r, None)
            cols.append(c)
        return Matrix(self.field, self.nrows, self.ncols, cols)

    def __neg__(self):
        neg = self.field.neg
        return Matrix(self.field, self.nrows, self.ncols,
                      [{r: neg(x) for r, x in c.items()} for c in self.cols])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if c == 0:
            return Matrix(self.field, self.nrows, self.ncols)
        mul = self.field.mul
        return Matrix(self.field, self.nrows, self.ncols,
                      [{r: mul(c, x) for r, x in col.items()} for col in self.cols])

    def apply(self, v: dict) -> dict:
        """Matrix times a sparse column vector."""
        out = {}
        f = self.field
        for c, x in v.items():
            for r, y in self.cols[c].items():
                out[r] = f.add(out.get(r, 0), f.mul(x, y))
        return {r: x for r, x in out.items() if x != 0}

    def __matmul__(self, other):
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return Matrix(self.field, self.nrows, other.ncols, [self.apply(c) for c in other.cols])

    def select_columns(self, idx):
        return Matrix(self.field, self.nrows, len(idx), [dict(self.cols[k]) for k in idx])

    def select_rows(self, idx):
        pos = {r: k for k, r in enumerate(idx)}
        cols = [{pos[r]: x for r, x in c.items() if r in pos} for c in self.cols]
        return Matrix(self.field, len(idx), self.ncols, cols)

    def map_entries(self, fn, field=None):
        field = field or self.field
        cols = []
        for c in self.cols:
            d = {}
            for r, x in c.items():
                y = fn(x)
                if y != 0:
                    d[r] = y
            cols.append(d)
        return Matrix(field, self.nrows, self.ncols, cols)


def _check_shape(a, b):
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch {a.shape} vs {b.shape}")


def hstack(field, nrows, blocks):
    cols = []
    for b in blocks:
        if b.nrows != nrows:
            raise ValueError("hstack row mismatch")
        cols.extend(dict(c) for c in b.cols)
    return Matrix(field, nrows, len(cols), cols)


def vstack(field, ncols, blocks):
    cols = [{} for _ in range(ncols)]
    off = 0
    for b in blocks:
        if b.ncols != ncols:
            raise ValueError("vstack column mismatch")
        for c, col in enumerate(b.cols):
            for r, x in col.items():
                cols[c][r + off] = x
        off += b.nrows
    return Matrix(field, off, ncols, cols)


def kron(a: Matrix, b: Matrix) -> Matrix:
    f = a.field
    mul = f.mul
    cols = []
    for ca in a.cols:
        for cb in b.cols:
            d = {}
            for ra, x in ca.items():
                base = ra * b.nrows
                for rb, y in cb.items():
                    d[base + rb] = mul(x, y)
            cols.append(d)
    return Matrix(f, a.nrows * b.nrows, a.ncols * b.ncols, cols)


class Builder:
    """Accumulates entries of a sparse matrix block by block."""

    __slots__ = ("field", "nrows", "ncols", "cols")

    def __init__(self, field, nrows, ncols):
        self.field = field
        self.nrows = nrows
        self.ncols = ncols
        self.cols = [{} for _ in range(ncols)]

    def add(self, r, c, x):
        col = self.cols[c]
        col[r] = self.field.add(col.get(r, 0), x)

    def add_block(self, roff, coff, m: Matrix, scale=None):
        f = self.field
        for c, col in enumerate(m.cols):
            tgt = self.cols[coff + c]
            for r, x in col.items():
                if scale is not None:
                    x = f.mul(scale, x)
                tgt[roff + r] = f.add(tgt.get(roff + r, 0), x)

    def add_kron(self, roff, coff, a, b, scale=None):
        """Add scale * (a kron b); a or b may be an int n meaning the n x n identity."""
        f = self.field
        mul, add = f.mul, f.add
        one = f.one if scale is None else scale
        if isinstance(a, int):
            a_cols = [{k: one} for k in range(a)]
        else:
            a_cols = [{r: mul(one, x) for r, x in col.items()} for col in a.cols]
        if isinstance(b, int):
            nb_rows, nb_cols = b, b
            b_cols = [{k: f.one} for k in range(b)]
        else:
            nb_rows, nb_cols = b.nrows, b.ncols
            b_cols = b.cols
        for ia, ca in enumerate(a_cols):
            if not ca:
                continue
            for ib, cb in enumerate(b_cols):
                if not cb:
                    continue
                tgt = self.cols[coff + ia * nb_cols + ib]
                for ra, x in ca.items():
                    base = roff + ra * nb_rows
                    for rb, y in cb.items():
                        k = base + rb
                        tgt[k] = add(tgt.get(k, 0), mul(x, y))

    def build(self):
        cols = [{r: x for r, x in c.items() if x != 0} for c in self.cols]
        return Matrix(self.field, self.nrows, self.ncols, cols)


# ---- elimination -------------------------------------------------------


def _axpy_fn(field):
    """Return sub(v, c, w): v -= c*w in place, dropping zeros."""
    if field.kind == PRIME:
        p = field.p

        def sub(v, c, w):
            for a, b in w.items():
                x = (v.get(a, 0) - c * b) % p
                if x:
                    v[a] = x
                else:
                    v.pop(a, None)
        return sub
    if field.kind == RATIONALS:
        def sub(v, c, w):
            for a, b in w.items():
                x = v.get(a, 0) - c * b
                if x:
                    v[a] = x
                else:
                    v.pop(a, None)
        return sub
    add, mul, neg = field.add, field.mul, field.neg

    def sub(v, c, w):
        nc = neg(c)
        for a, b in w.items():
            x = add(v.get(a, 0), mul(nc, b))
            if x:
                v[a] = x
            else:
                v.pop(a, None)
    return sub


def _normalize(field, v, k):
    inv = field.inv(v[k])
    mul = field.mul
    return {a: mul(inv, b) for a, b in v.items()}


def _echelon(field, vectors, limit=None):
    """Forward elimination of sparse vectors.

    Returns ``(pivots, leftovers)``: pivots maps a leading index to a vector
    normalized to 1 there whose other entries all have larger indices. With a
    ``limit``, only indices below it may serve as pivots and vectors reduced
    to entries at or beyond it are returned as leftovers.
    """
    sub = _axpy_fn(field)
    pivots = {}
    leftovers = []
    for v in vectors:
        v = dict(v)
        while v:
            keys = v if limit is None else [a for a in v if a < limit]
            if not keys:
                leftovers.append(v)
                break
            k = min(keys)
            w = pivots.get(k)
            if w is None:
                pivots[k] = _normalize(field, v, k)
                break
            sub(v, v[k], w)
    return pivots, leftovers


def rank(m: Matrix) -> int:
    if m.nrows == 0 or m.ncols == 0:
        return 0
    # eliminate along the shorter side
    vecs = m.cols if m.ncols <= m.nrows else m.row_dicts()
    pivots, _ = _echelon(m.field, vecs)
    return len(pivots)


def _back_substitute(field, pivots):
    sub = _axpy_fn(field)
    order = sorted(pivots)
    for idx in range(len(order) - 1, -1, -1):
        c = order[idx]
        w = pivots[c]
        for c2 in order[:idx]:
            v = pivots[c2]
            x = v.get(c)
            if x:
                sub(v, x, w)
    return pivots


def rref(m: Matrix):
    """Reduced row echelon form as ``{pivot column: row dict}``."""
    pivots, _ = _echelon(m.field, m.row_dicts())
    return _back_substitute(m.field, pivots)


def kernel(m: Matrix) -> Matrix:
    """Columns form a basis of the null space, one per free column."""
    f = m.field
    piv = rref(m)
    free = [c for c in range(m.ncols) if c not in piv]
    vecs = []
    for c in free:
        v = {c: f.one}
        for pc, row in piv.items():
            x = row.get(c)
            if x:
                v[pc] = f.neg(x)
        vecs.append(v)
    return Matrix(f, m.ncols, len(vecs), vecs)


def pivot_columns(m: Matrix):
    pivots, _ = _echelon(m.field, m.row_dicts())
    return sorted(pivots)


def image(m: Matrix) -> Matrix:
    """A subset of the columns of m that forms a basis of its column space."""
    return m.select_columns(pivot_columns(m))


def rank_kernel_image(m: Matrix):
    piv = rref(m)
    f = m.field
    free = [c for c in range(m.ncols) if c not in piv]
    vecs = []
    for c in free:
        v = {c: f.one}
        for pc, row in piv.items():
            x = row.get(c)
            if x:
                v[pc] = f.neg(x)
        vecs.append(v)
    return len(piv), Matrix(f, m.ncols, len(vecs), vecs), m.select_columns(sorted(piv))


def solve(m: Matrix, target: Matrix):
    """Some x with m @ x == target, or None if the system is inconsistent."""
    if m.nrows != target.nrows:
        raise ValueError("solve: row counts differ")
    f = m.field
    n = m.ncols
    rows = m.row_dicts()
    for c, col in enumerate(target.cols):
        for r, x in col.items():
            rows[r][n + c] = x
    pivots, leftovers = _echelon(f, rows, limit=n)
    if leftovers:
        return None
    _back_substitute(f, pivots)
    cols = [{} for _ in range(target.ncols)]
    for pc, row in pivots.items():
        for a, x in row.items():
            if a >= n:
                cols[a - n][pc] = x
    return Matrix(f, n, target.ncols, cols)


def in_span(basis: Matrix, v: dict) -> bool:
    return solve(basis, Matrix(basis.field, basis.nrows, 1, [dict(v)])) is not None


class SpanTracker:
    """Incrementally maintained span of sparse vectors (for choosing complements)."""

    def __init__(self, field):
        self.field = field
        self.pivots = {}
        self._sub = _axpy_fn(field)

    def add(self, v) -> bool:
        """Insert v; True iff it was independent of what was already there."""
        v = dict(v)
        while v:
            k = min(v)
            w = self.pivots.get(k)
            if w is None:
                self.pivots[k] = _normalize(self.field, v, k)
                return True
            self._sub(v, v[k], w)
        return False

    def contains(self, v) -> bool:
        v = dict(v)
        while v:
            k = min(v)
            w = self.pivots.get(k)
            if w is None:
                return False
            self._sub(v, v[k], w)
        return True

    @property
    def dim(self):
        return len(self.pivots)
