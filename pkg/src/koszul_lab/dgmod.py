"""Dg-modules over a SymDgAlgebra, presented by differential and generator-action blocks.

Modules are lazy: blocks are computed per bidegree on first request and cached.
Because all differentials preserve the internal degree j, a module only ever needs
to be evaluated on the internal degrees someone asks about. ``j_lo``/``j_hi`` record
a uniform bound on the internal support (None when unbounded on that side).
"""

from __future__ import annotations

from .bigraded import (Bidegree, ComplexMap, Window, cohomology, cycle_representatives,
                       d_squared_violations)
from .linalg import Builder, Matrix, SpanTracker, image, kernel, rank, solve
from .symdg import AlgebraMorphism, SymDgAlgebra


class ModuleError(ValueError):
    pass


class WindowError(ModuleError):
    def __init__(self, msg, required=None):
        super().__init__(msg)
        self.required = required


class DgModule:
    j_lo = None
    j_hi = None

    def __init__(self, algebra: SymDgAlgebra):
        self.algebra = algebra
        self.field = algebra.field
        self._dcache = {}
        self._acache = {}
        self._degcache = {}

    # subclasses provide _degrees, dim, _diff, _act

    def degrees(self, j):
        r = self._degcache.get(j)
        if r is None:
            r = sorted(i for i in set(self._degrees(j)) if self.dim(i, j))
            self._degcache[j] = r
        return r

    def d(self, i, j) -> Matrix:
        key = (i, j)
        m = self._dcache.get(key)
        if m is None:
            rows, cols = self.dim(i + 1, j), self.dim(i, j)
            m = self._diff(i, j) if rows and cols else Matrix(self.field, rows, cols)
            self._dcache[key] = m
        return m

    def act(self, k, i, j) -> Matrix:
        key = (k, i, j)
        m = self._acache.get(key)
        if m is None:
            a, b = self.algebra.generators[k].bidegree
            rows, cols = self.dim(i + a, j + b), self.dim(i, j)
            m = self._act(k, i, j) if rows and cols else Matrix(self.field, rows, cols)
            self._acache[key] = m
        return m

    def act_vector(self, k, i, j, v: dict) -> dict:
        return self.act(k, i, j).apply(v)

    def act_monomial(self, mono, i, j, v: dict) -> dict:
        """Apply a monomial of the algebra to a vector at (i, j)."""
        gens = self.algebra.generators
        for k in range(len(mono) - 1, -1, -1):
            g = gens[k]
            for _ in range(mono[k]):
                if not v:
                    return v
                v = self.act(k, i, j).apply(v)
                i, j = i + g.c, j + g.t
        return v

    def internal_degrees(self, w: Window):
        return [j for j in w if self.degrees(j)]

    def total_dim(self, w: Window):
        return sum(self.dim(i, j) for j in w for i in self.degrees(j))


# ---- concrete modules ---------------------------------------------------------


class FiniteModule(DgModule):
    """Module with explicitly stored blocks (JSON input, trivial modules, random tests)."""

    def __init__(self, algebra, dims, diff=None, actions=None):
        super().__init__(algebra)
        self.dims = {Bidegree(*b): int(n) for b, n in dims.items() if n}
        self._diff_blocks = {Bidegree(*b): m for b, m in (diff or {}).items()}
        self._act_blocks = {}
        for k, blocks in (actions or {}).items():
            self._act_blocks[k] = {Bidegree(*b): m for b, m in blocks.items()}
        for b, m in self._diff_blocks.items():
            if m.shape != (self.dim(b.i + 1, b.j), self.dim(*b)):
                raise ModuleError(f"differential block at {tuple(b)} has wrong shape {m.shape}")
        for k, blocks in self._act_blocks.items():
            a, t = algebra.generators[k].bidegree
            for b, m in blocks.items():
                if m.shape != (self.dim(b.i + a, b.j + t), self.dim(*b)):
                    raise ModuleError(f"action block of {algebra.generators[k].label} at "
                                      f"{tuple(b)} has wrong shape {m.shape}")
        js = [b.j for b in self.dims]
        self.j_lo = min(js) if js else 0
        self.j_hi = max(js) if js else 0

    def _degrees(self, j):
        return [b.i for b in self.dims if b.j == j]

    def dim(self, i, j):
        return self.dims.get((i, j), 0)

    def _diff(self, i, j):
        m = self._diff_blocks.get((i, j))
        return m if m is not None else Matrix(self.field, self.dim(i + 1, j), self.dim(i, j))

    def _act(self, k, i, j):
        m = self._act_blocks.get(k, {}).get((i, j))
        if m is None:
            a, b = self.algebra.generators[k].bidegree
            return Matrix(self.field, self.dim(i + a, j + b), self.dim(i, j))
        return m

    @classmethod
    def snapshot(cls, M: DgModule, w: Window):
        """Copy of M on the internal degrees of w (actions leaving w are dropped)."""
        dims, diff, acts = {}, {}, {}
        for j in w:
            for i in M.degrees(j):
                dims[(i, j)] = M.dim(i, j)
        for (i, j) in dims:
            if M.dim(i + 1, j):
                diff[(i, j)] = M.d(i, j)
            for k, g in enumerate(M.algebra.generators):
                if (i + g.c, j + g.t) in dims:
                    m = M.act(k, i, j)
                    if not m.is_zero():
                        acts.setdefault(k, {})[(i, j)] = m
        return cls(M.algebra, dims, diff, acts)


class SemiFreeModule(DgModule):
    """Free module on generators e with d(e) a combination of monomial multiples of other generators.

    ``gen_diff[e]`` maps (monomial, generator index) to a coefficient. With all
    gen_diff empty this is the free module, whose differential is that of the algebra.
    """

    def __init__(self, algebra, gens, gen_diff=None, valid=None):
        super().__init__(algebra)
        self.gens = [Bidegree(*g) for g in gens]
        self.gen_diff = [dict(x) for x in (gen_diff or [{} for _ in self.gens])]
        if len(self.gen_diff) != len(self.gens):
            raise ModuleError("one differential per generator required")
        for k, dg in enumerate(self.gen_diff):
            for (m, e) in dg:
                c, t = algebra.degree_of(m)
                if (c + self.gens[e].i, t + self.gens[e].j) != (self.gens[k].i + 1, self.gens[k].j):
                    raise ModuleError(f"differential of generator {k} has a term of wrong bidegree")
        self.valid = valid  # Window on which this presentation is certified, if truncated
        js = [g.j for g in self.gens]
        if algebra.direction >= 0 and js:
            self.j_lo = min(js)
        if algebra.direction <= 0 and js:
            self.j_hi = max(js)
        if algebra.direction == 0:
            self.j_lo, self.j_hi = (min(js), max(js)) if js else (0, 0)
        elif algebra.finite and js:
            top = sum(g.t for g in algebra.generators)
            self.j_lo, self.j_hi = min(js) + min(top, 0), max(js) + max(top, 0)
        self._bcache = {}

    def _check_window(self, j):
        # only degree listings are guarded: those are what cohomology and tensor
        # products iterate over, while action targets may legitimately fall outside
        if self.valid is not None and j not in self.valid:
            raise WindowError(f"semi-free presentation is only valid on {self.valid}; "
                              f"internal degree {j} requested", required=j)

    def basis(self, i, j):
        key = (i, j)
        b = self._bcache.get(key)
        if b is None:
            A = self.algebra
            b = []
            for e, g in enumerate(self.gens):
                for m in A.monomials(i - g.i, j - g.j):
                    b.append((m, e))
            self._bcache[key] = (b, {x: p for p, x in enumerate(b)})
            b = self._bcache[key]
        return b

    def _degrees(self, j):
        self._check_window(j)
        out = set()
        for g in self.gens:
            for c in self.algebra.degrees(j - g.j):
                out.add(c + g.i)
        return out

    def dim(self, i, j):
        return len(self.basis(i, j)[0])

    def _diff(self, i, j):
        A = self.algebra
        f = self.field
        src, _ = self.basis(i, j)
        _, tgt = self.basis(i + 1, j)
        b = Builder(f, len(tgt), len(src))
        gens = A.generators
        for col, (m, e) in enumerate(src):
            for mm, x in A.diff(m).items():
                b.add(tgt[(mm, e)], col, x)
            if self.gen_diff[e]:
                deg = sum(x * g.c for x, g in zip(m, gens)) & 1
                for (t, e2), x in self.gen_diff[e].items():
                    r = A.multiply(m, t)
                    if r is None:
                        continue
                    y = x if not (deg + r[0]) & 1 else f.neg(x)
                    b.add(tgt[(r[1], e2)], col, y)
        return b.build()

    def _act(self, k, i, j):
        A = self.algebra
        g = A.generators[k]
        src, _ = self.basis(i, j)
        _, tgt = self.basis(i + g.c, j + g.t)
        b = Builder(self.field, len(tgt), len(src))
        gm = A.gen_monomial(k)
        for col, (m, e) in enumerate(src):
            r = A.multiply(gm, m)
            if r is not None:
                b.add(tgt[(r[1], e)], col, self.field.sign(r[0]))
        return b.build()

    def generator_vector(self, e) -> dict:
        g = self.gens[e]
        _, idx = self.basis(g.i, g.j)
        return {idx[(self.algebra.unit, e)]: self.field.one}


class DualModule(DgModule):
    """Hom(M, k) with (a.phi)(m) = (-1)^{|a||phi|} phi(a.m) and d(phi) = -(-1)^{|phi|} phi o d."""

    def __init__(self, M: DgModule):
        super().__init__(M.algebra)
        self.M = M
        self.j_lo = None if M.j_hi is None else -M.j_hi
        self.j_hi = None if M.j_lo is None else -M.j_lo

    def _degrees(self, j):
        return [-i for i in self.M.degrees(-j)]

    def dim(self, i, j):
        return self.M.dim(-i, -j)

    def _diff(self, i, j):
        # block (i, j) -> (i+1, j) is the transpose of M's block (-i-1, -j) -> (-i, -j)
        s = self.field.sign(i + 1)
        return self.M.d(-i - 1, -j).transpose().scale(s)

    def _act(self, k, i, j):
        a, b = self.algebra.generators[k].bidegree
        s = self.field.sign(a * i)
        return self.M.act(k, -i - a, -j - b).transpose().scale(s)


class ShiftedModule(DgModule):
    """M[n]<m>: (M[n]<m>)^i_j = M^{i+n}_{j-m}, d scaled by (-1)^n, a generator of degree a by (-1)^{na}."""

    def __init__(self, M: DgModule, n=0, m=0):
        super().__init__(M.algebra)
        self.M, self.n, self.m = M, n, m
        self.j_lo = None if M.j_lo is None else M.j_lo + m
        self.j_hi = None if M.j_hi is None else M.j_hi + m

    def _degrees(self, j):
        return [i - self.n for i in self.M.degrees(j - self.m)]

    def dim(self, i, j):
        return self.M.dim(i + self.n, j - self.m)

    def _diff(self, i, j):
        return self.M.d(i + self.n, j - self.m).scale(self.field.sign(self.n))

    def _act(self, k, i, j):
        a = self.algebra.generators[k].c
        return self.M.act(k, i + self.n, j - self.m).scale(self.field.sign(self.n * a))


class RegradedModule(DgModule):
    """The relabelling (i, j) -> (i + s*j, j) onto an algebra with the same generators.

    s = +1 is the regrading from S-modules to R-modules; s = -1 undoes it.
    """

    def __init__(self, M: DgModule, algebra: SymDgAlgebra, s: int):
        super().__init__(algebra)
        if algebra.ngens != M.algebra.ngens:
            raise ModuleError("regrading needs matching generators")
        self.M, self.s = M, s
        self.j_lo, self.j_hi = M.j_lo, M.j_hi

    def _degrees(self, j):
        return [i + self.s * j for i in self.M.degrees(j)]

    def dim(self, i, j):
        return self.M.dim(i - self.s * j, j)

    def _diff(self, i, j):
        return self.M.d(i - self.s * j, j)

    def _act(self, k, i, j):
        return self.M.act(k, i - self.s * j, j)


class RestrictedModule(DgModule):
    """Phi_*(M): same underlying complex, source generators act through their images."""

    def __init__(self, phi: AlgebraMorphism, M: DgModule):
        if M.algebra is not phi.target:
            raise ModuleError("module is not over the target of the morphism")
        super().__init__(phi.source)
        self.phi, self.M = phi, M
        self.j_lo, self.j_hi = M.j_lo, M.j_hi

    def _degrees(self, j):
        return self.M.degrees(j)

    def dim(self, i, j):
        return self.M.dim(i, j)

    def _diff(self, i, j):
        return self.M.d(i, j)

    def _act(self, k, i, j):
        a, b = self.algebra.generators[k].bidegree
        out = Matrix(self.field, self.dim(i + a, j + b), self.dim(i, j))
        for h, x in self.phi.gen_images[k].items():
            out = out + self.M.act(h, i, j).scale(x)
        return out


class TruncatedModule(DgModule):
    """Quotient of M by the submodule of internal degrees beyond ``bound``.

    Generators move internal degree in one direction, so the part of M past the
    bound in that direction is a dg-submodule and the quotient keeps the rest.
    """

    def __init__(self, M: DgModule, bound: int):
        super().__init__(M.algebra)
        self.M, self.bound = M, bound
        if M.algebra.direction > 0:
            self.j_lo, self.j_hi = M.j_lo, bound
        else:
            self.j_lo, self.j_hi = bound, M.j_hi

    def _keep(self, j):
        return j <= self.bound if self.algebra.direction > 0 else j >= self.bound

    def _degrees(self, j):
        return self.M.degrees(j) if self._keep(j) else []

    def dim(self, i, j):
        return self.M.dim(i, j) if self._keep(j) else 0

    def _diff(self, i, j):
        return self.M.d(i, j)

    def _act(self, k, i, j):
        return self.M.act(k, i, j)


class ConeModule(DgModule):
    """Cone of a module map f: S -> T; a acts on the S[1] summand with sign (-1)^|a|."""

    def __init__(self, f: "DgModuleMap"):
        super().__init__(f.source.algebra)
        self.f, self.S, self.T = f, f.source, f.target
        self.j_lo = _min_opt(self.S.j_lo, self.T.j_lo)
        self.j_hi = _max_opt(self.S.j_hi, self.T.j_hi)

    def _degrees(self, j):
        return {i - 1 for i in self.S.degrees(j)} | set(self.T.degrees(j))

    def dim(self, i, j):
        return self.S.dim(i + 1, j) + self.T.dim(i, j)

    def _diff(self, i, j):
        S, T, f = self.S, self.T, self.f
        b = Builder(self.field, self.dim(i + 1, j), self.dim(i, j))
        b.add_block(0, 0, S.d(i + 1, j), self.field.neg(self.field.one))
        b.add_block(S.dim(i + 2, j), 0, f.block(i + 1, j))
        b.add_block(S.dim(i + 2, j), S.dim(i + 1, j), T.d(i, j))
        return b.build()

    def _act(self, k, i, j):
        a, t = self.algebra.generators[k].bidegree
        S, T = self.S, self.T
        b = Builder(self.field, self.dim(i + a, j + t), self.dim(i, j))
        b.add_block(0, 0, S.act(k, i + 1, j), self.field.sign(a))
        b.add_block(S.dim(i + a + 1, j + t), S.dim(i + 1, j), T.act(k, i, j))
        return b.build()


def _min_opt(a, b):
    return None if a is None or b is None else min(a, b)


def _add_opt(a, b):
    return None if a is None or b is None else a + b


def _max_opt(a, b):
    return None if a is None or b is None else max(a, b)


class TwistedTensor(DgModule):
    """L (x) R with d = d_L (x) 1 + (-1)^{|l|} 1 (x) d_R + twist, acted on through L.

    The twist is sum over pairs (g, h) of (-1)^{|l|(1+|g|)} g.l (x) h.r, where g is a
    generator of L's algebra and h one of R's. Either both factors are bounded above
    in internal degree, or L is bounded on both sides and R below; either way every
    bidegree is finite-dimensional.
    """

    def __init__(self, L: DgModule, R: DgModule, pairs):
        super().__init__(L.algebra)
        if L.j_hi is None:
            raise ModuleError("the left tensor factor must have internal degrees bounded above")
        if R.j_hi is None and (L.j_lo is None or R.j_lo is None):
            raise ModuleError("tensor factors must have internal degrees bounded above")
        self.L, self.R, self.pairs = L, R, list(pairs)
        self.j_hi = _add_opt(L.j_hi, R.j_hi)
        self.j_lo = _add_opt(L.j_lo, R.j_lo)
        self._layout = {}

    def layout(self, j):
        """Per cohomological degree: list of (iL, jL, iR, jR, offset) and offsets by (iL, jL)."""
        lay = self._layout.get(j)
        if lay is None:
            L, R = self.L, self.R
            blocks = {}
            lo = L.j_lo if R.j_hi is None else j - R.j_hi
            for jL in range(lo, L.j_hi + 1):
                jR = j - jL
                if L.j_lo is not None and jL < L.j_lo:
                    continue
                if R.j_lo is not None and jR < R.j_lo:
                    continue
                degsL = L.degrees(jL)
                if not degsL:
                    continue
                degsR = R.degrees(jR)
                for iL in degsL:
                    for iR in degsR:
                        blocks.setdefault(iL + iR, []).append((iL, jL, iR, jR))
            lay = {}
            for i, bl in blocks.items():
                off = 0
                entries = []
                where = {}
                for (iL, jL, iR, jR) in sorted(bl):
                    n = L.dim(iL, jL) * R.dim(iR, jR)
                    entries.append((iL, jL, iR, jR, off))
                    where[(iL, jL)] = off
                    off += n
                lay[i] = (entries, where, off)
            self._layout[j] = lay
        return lay

    def _degrees(self, j):
        return list(self.layout(j))

    def dim(self, i, j):
        lay = self.layout(j).get(i)
        return lay[2] if lay else 0

    def _diff(self, i, j):
        L, R, f = self.L, self.R, self.field
        entries, _, ncols = self.layout(j)[i]
        tgt = self.layout(j).get(i + 1)
        b = Builder(f, tgt[2], ncols)
        where = tgt[1]
        Lgens, Rgens = L.algebra.generators, R.algebra.generators
        for (iL, jL, iR, jR, co) in entries:
            nL, nR = L.dim(iL, jL), R.dim(iR, jR)
            ro = where.get((iL + 1, jL))
            if ro is not None and L.dim(iL + 1, jL):
                b.add_kron(ro, co, L.d(iL, jL), nR)
            ro = where.get((iL, jL))
            if R.dim(iR + 1, jR):
                b.add_kron(ro, co, nL, R.d(iR, jR), f.sign(iL))
            for gk, hk in self.pairs:
                g, h = Lgens[gk], Rgens[hk]
                ro = where.get((iL + g.c, jL + g.t))
                if ro is None:
                    continue
                if not L.dim(iL + g.c, jL + g.t) or not R.dim(iR + h.c, jR + h.t):
                    continue
                A = L.act(gk, iL, jL)
                if A.is_zero():
                    continue
                B = R.act(hk, iR, jR)
                if B.is_zero():
                    continue
                b.add_kron(ro, co, A, B, f.sign(iL * (1 + g.c)))
        return b.build()

    def _act(self, k, i, j):
        L, R = self.L, self.R
        g = self.algebra.generators[k]
        entries, _, ncols = self.layout(j)[i]
        tgt = self.layout(j + g.t).get(i + g.c)
        b = Builder(self.field, tgt[2], ncols)
        where = tgt[1]
        for (iL, jL, iR, jR, co) in entries:
            ro = where.get((iL + g.c, jL + g.t))
            if ro is None:
                continue
            A = L.act(k, iL, jL)
            if not A.is_zero():
                b.add_kron(ro, co, A, R.dim(iR, jR))
        return b.build()

    def locate(self, i, j, iL, jL):
        """Offset of the L^{iL,jL} (x) R block inside the (i, j) basis, or None."""
        lay = self.layout(j).get(i)
        return None if lay is None else lay[1].get((iL, jL))


# ---- maps -----------------------------------------------------------------------


class DgModuleMap(ComplexMap):
    def violations(self, w: Window):
        """Bidegrees where the map fails to commute with d or with some generator."""
        bad = [("d", b) for b in self.chain_violations(w)]
        S, T = self.source, self.target
        for k, g in enumerate(S.algebra.generators):
            for j in w:
                for i in S.degrees(j):
                    lhs = T.act(k, i, j) @ self.block(i, j)
                    rhs = self.block(i + g.c, j + g.t) @ S.act(k, i, j)
                    if lhs != rhs:
                        bad.append((g.label, Bidegree(i, j)))
        return bad


def identity_map(M: DgModule) -> DgModuleMap:
    return DgModuleMap(M, M, lambda i, j: Matrix.identity(M.field, M.dim(i, j)))


def compose(g: ComplexMap, f: ComplexMap) -> DgModuleMap:
    return DgModuleMap(f.source, g.target, lambda i, j: g.block(i, j) @ f.block(i, j))


# ---- operations ------------------------------------------------------------------


def free_module(A: SymDgAlgebra, gens) -> SemiFreeModule:
    return SemiFreeModule(A, gens)


def trivial_module(A: SymDgAlgebra, dims, diff=None) -> FiniteModule:
    return FiniteModule(A, dims, diff)


def dualize(M: DgModule, omega=None) -> DgModule:
    """Dual against Omega; Omega defaults to k at (0, 0) and may carry a bidegree."""
    D = DualModule(M)
    if omega is not None and tuple(omega.degree) != (0, 0):
        a, b = omega.degree
        D = ShiftedModule(D, -a, b)
    return D


def double_dual_map(M: DgModule) -> DgModuleMap:
    """The canonical m -> (phi -> (-1)^{|m||phi|} phi(m)) into the double dual."""
    DD = DualModule(DualModule(M))
    return DgModuleMap(M, DD, lambda i, j: Matrix.scalar(M.field, M.dim(i, j), M.field.sign(i)))


def shift_module(M: DgModule, n: int) -> DgModule:
    return ShiftedModule(M, n, 0)


def twist_module(M: DgModule, m: int) -> DgModule:
    return ShiftedModule(M, 0, m)


def cone_module(f: DgModuleMap) -> DgModule:
    return ConeModule(f)


def restrict_scalars(phi: AlgebraMorphism, M: DgModule) -> DgModule:
    return RestrictedModule(phi, M)


def extend_scalars(phi: AlgebraMorphism, M: DgModule, w: Window | None = None) -> SemiFreeModule:
    """Target (x)_source M on a semi-free presentation; resolves first when a window is given."""
    if M.algebra is not phi.source:
        raise ModuleError("module is not over the source of the morphism")
    if not isinstance(M, SemiFreeModule):
        if w is None:
            raise ModuleError("module is not semi-free; pass a window to resolve it first")
        M, _ = semifree_resolution(M, w)
    T = phi.target
    gd = []
    f = T.field
    for dg in M.gen_diff:
        out = {}
        for (t, e), x in dg.items():
            for tt, y in phi.apply(t).items():
                out[(tt, e)] = f.add(out.get((tt, e), 0), f.mul(x, y))
        gd.append({k: x for k, x in out.items() if x != 0})
    return SemiFreeModule(T, M.gens, gd, valid=M.valid)


def validate(M: DgModule, w: Window):
    """Every violated dg-module axiom on w, as dicts naming the invariant and bidegree."""
    report = []
    f = M.field
    A = M.algebra
    for b in d_squared_violations(M, w):
        report.append({"invariant": "d^2 = 0", "bidegree": list(b)})
    gens = A.generators
    for j in w:
        for i in M.degrees(j):
            for k, g in enumerate(gens):
                lhs = M.d(i + g.c, j + g.t) @ M.act(k, i, j)
                lhs = lhs - (M.act(k, i + 1, j) @ M.d(i, j)).scale(f.sign(g.c))
                rhs = Matrix(f, lhs.nrows, lhs.ncols)
                for h, x in A.gen_diff[k].items():
                    rhs = rhs + M.act(h, i, j).scale(x)
                if lhs != rhs:
                    report.append({"invariant": "Leibniz", "generator": g.label, "bidegree": [i, j]})
                for h in range(k, len(gens)):
                    gh = gens[h]
                    ab = M.act(k, i + gh.c, j + gh.t) @ M.act(h, i, j)
                    if h == k:
                        if g.parity and not ab.is_zero():
                            report.append({"invariant": "odd square", "generator": g.label,
                                           "bidegree": [i, j]})
                        continue
                    ba = M.act(h, i + g.c, j + g.t) @ M.act(k, i, j)
                    if ab != ba.scale(f.sign(g.c * gh.c)):
                        report.append({"invariant": "graded commutation",
                                       "generator": f"{g.label},{gh.label}", "bidegree": [i, j]})
    return report


def module_cohomology(M: DgModule, w: Window, representatives=False):
    return cohomology(M, w, representatives=representatives, check=False)


# ---- semi-free resolutions ---------------------------------------------------------


def semifree_resolution(M: DgModule, w: Window):
    """Staircase resolution P -> M, exact on every internal degree between M's bound and w.

    Internal degrees are processed starting from the bounded end of M; in each one,
    new free generators first hit the cohomology of M missed so far and then kill
    the cycles of P that map to boundaries.
    """
    if isinstance(M, SemiFreeModule):
        return M, identity_map(M)
    A = M.algebra
    f = M.field
    if A.direction > 0 or (A.direction == 0 and M.j_lo is not None):
        if M.j_lo is None:
            raise ModuleError("resolution over positively generated algebras needs j bounded below")
        js = range(min(M.j_lo, w.j_max + 1), w.j_max + 1)
        valid = Window(min(M.j_lo, w.j_min), w.j_max)
    else:
        if M.j_hi is None:
            raise ModuleError("resolution over negatively generated algebras needs j bounded above")
        js = range(max(M.j_hi, w.j_min - 1), w.j_min - 1, -1)
        valid = Window(w.j_min, max(M.j_hi, w.j_max))
    gens, gdiff, images = [], [], []
    memo = {}

    def p_column(P, i, j, m, e):
        key = (m, e)
        v = memo.get(key)
        if v is None:
            g = gens[e]
            v = M.act_monomial(m, g.i, g.j, images[e])
            memo[key] = v
        return v

    def p_block(P, i, j):
        basis, _ = P.basis(i, j)
        return Matrix.from_columns(f, M.dim(i, j), [p_column(P, i, j, m, e) for m, e in basis])

    for j in js:
        P = SemiFreeModule(A, gens, gdiff)
        degs = sorted(set(P.degrees(j)) | set(M.degrees(j)), reverse=True)
        new = []
        for i in degs:
            dM = M.d(i, j)
            zM = kernel(dM) if M.dim(i + 1, j) else Matrix.identity(f, M.dim(i, j))
            bM = image(M.d(i - 1, j)) if M.dim(i - 1, j) else Matrix(f, M.dim(i, j), 0)
            if P.dim(i, j):
                zP = kernel(P.d(i, j)) if P.dim(i + 1, j) else Matrix.identity(f, P.dim(i, j))
                pz = p_block(P, i, j) @ zP
            else:
                zP = pz = Matrix(f, M.dim(i, j), 0)
            # surject onto H(M)
            span = SpanTracker(f)
            for col in bM.cols + pz.cols:
                span.add(col)
            for col in zM.cols:
                if span.add(col):
                    new.append((Bidegree(i, j), {}, col))
            # kill cycles of P mapping to boundaries
            if zP.ncols:
                stacked = Matrix(f, M.dim(i, j), pz.ncols + bM.ncols, pz.cols + bM.cols)
                ker = kernel(stacked)
                bP = image(P.d(i - 1, j)) if P.dim(i - 1, j) else Matrix(f, P.dim(i, j), 0)
                spanP = SpanTracker(f)
                for col in bP.cols:
                    spanP.add(col)
                basis, _ = P.basis(i, j)
                for kv in ker.cols:
                    coef = {r: x for r, x in kv.items() if r < zP.ncols}
                    z = zP.apply(coef)
                    if not z or not spanP.add(z):
                        continue
                    target = p_block(P, i, j).apply(z)
                    sol = solve(M.d(i - 1, j), Matrix(f, M.dim(i, j), 1, [target])) \
                        if target else None
                    lift = sol.cols[0] if sol is not None else {}
                    if target and sol is None:
                        raise ModuleError("internal error: boundary without preimage")
                    dz = {basis[r]: x for r, x in z.items()}
                    new.append((Bidegree(i - 1, j), dz, lift))
        for b, dz, img in new:
            gens.append(b)
            gdiff.append(dz)
            images.append(img)
    P = SemiFreeModule(A, gens, gdiff, valid=valid)

    def block(i, j):
        basis, _ = P.basis(i, j)
        return Matrix.from_columns(f, M.dim(i, j), [p_column(P, i, j, m, e) for m, e in basis])

    return P, DgModuleMap(P, M, block)


# ---- finite generation surrogate --------------------------------------------------------


def window_generation_check(M: DgModule, gen_window: Window, test_window: Window) -> bool:
    """Do the classes in gen_window generate all cohomology in test_window?

    Classes are moved by cohomology classes of the algebra (cycles of nonzero
    internal degree). A pass certifies generation only inside test_window.
    """
    return not generation_defects(M, gen_window, test_window)


def algebra_cycle_classes(A: SymDgAlgebra, w: Window):
    """Representatives (as monomial combinations) of H(A) in the internal degrees of w, j != 0."""
    out = []
    for t in w:
        if t == 0:
            continue
        for c in A.degrees(t):
            reps = cycle_representatives(A, c, t)
            monos = A.monomials(c, t)
            for col in reps.cols:
                out.append(((c, t), {monos[r]: x for r, x in col.items()}))
    return out


def generation_defects(M: DgModule, gen_window: Window, test_window: Window):
    """Bidegrees in test_window whose cohomology is not reached from gen_window."""
    A = M.algebra
    f = M.field
    span_len = test_window.j_max - test_window.j_min
    movers = algebra_cycle_classes(A, Window(-span_len, span_len))
    js = list(test_window)
    if A.direction < 0:
        js.reverse()
    spans = {}
    missing = []
    for j in js:
        for i in M.degrees(j):
            z = kernel(M.d(i, j)) if M.dim(i + 1, j) else Matrix.identity(f, M.dim(i, j))
            r_in = rank(M.d(i - 1, j)) if M.dim(i - 1, j) else 0
            h = z.ncols - r_in
            if h == 0:
                continue
            span = SpanTracker(f)
            if M.dim(i - 1, j):
                for col in image(M.d(i - 1, j)).cols:
                    span.add(col)
            reps = []
            if j in gen_window:
                reps = [col for col in z.cols if span.add(col)]
            else:
                for (c, t), elt in movers:
                    src = spans.get((i - c, j - t))
                    if not src:
                        continue
                    for v in src:
                        u = {}
                        for mono, x in elt.items():
                            for r, y in M.act_monomial(mono, i - c, j - t, v).items():
                                u[r] = f.add(u.get(r, 0), f.mul(x, y))
                        u = {r: y for r, y in u.items() if y != 0}
                        if u and span.add(u):
                            reps.append(u)
            spans[(i, j)] = reps
            if len(reps) < h:
                missing.append(Bidegree(i, j))
    return missing


# ---- random modules (test corpora) ---------------------------------------------------


def random_semifree(A: SymDgAlgebra, rng, ngens=3, i_range=(-2, 1), j_range=(0, 2), density=0.7):
    """Semi-free module whose generators get random cycles of the earlier part as differentials.

    Generators are added in order; each picks a random combination of a kernel basis
    of the module generated so far, one cohomological degree up.
    """
    f = A.field
    gens, gdiff = [], []
    for _ in range(ngens):
        b = Bidegree(rng.randint(*i_range), rng.randint(*j_range))
        dz = {}
        if gens:
            P = SemiFreeModule(A, gens, gdiff)
            if P.dim(b.i + 1, b.j):
                z = kernel(P.d(b.i + 1, b.j)) if P.dim(b.i + 2, b.j) else \
                    Matrix.identity(f, P.dim(b.i + 1, b.j))
                basis, _ = P.basis(b.i + 1, b.j)
                v = {}
                for col in z.cols:
                    if rng.random() < density:
                        c = f.random(rng)
                        for r, x in col.items():
                            v[r] = f.add(v.get(r, 0), f.mul(c, x))
                dz = {basis[r]: x for r, x in v.items() if x != 0}
        gens.append(b)
        gdiff.append(dz)
    return SemiFreeModule(A, gens, gdiff)


def random_finite(A: SymDgAlgebra, rng, span=4, **kw):
    """A random finite-dimensional module: a semi-free module cut to ``span`` internal degrees."""
    P = random_semifree(A, rng, **kw)
    if A.direction >= 0:
        lo = min(g.j for g in P.gens)
        w = Window(lo, lo + span)
        M = TruncatedModule(P, w.j_max)
    else:
        hi = max(g.j for g in P.gens)
        w = Window(hi - span, hi)
        M = TruncatedModule(P, w.j_min)
    return FiniteModule.snapshot(M, w)
