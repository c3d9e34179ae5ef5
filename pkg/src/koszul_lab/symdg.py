"""Generator complexes and the free graded-commutative dg-algebras on them.

A monomial is a tuple of exponents indexed by the algebra's generators, which
are kept in normal order (cohomological degree, then index). Odd generators
have exponent 0 or 1. Products are normal ordered with the Koszul sign, which
only involves odd-odd transpositions.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fields import FieldSpec
from .linalg import Builder, Matrix, kernel


class GeneratorError(ValueError):
    pass


class GeneratorComplex:
    """Finite complex of free modules V^i placed in a single internal degree."""

    def __init__(self, field: FieldSpec, ranks, diffs=None, internal_degree=2):
        self.field = field
        self.ranks = {int(i): int(r) for i, r in ranks.items() if int(r) > 0}
        self.internal_degree = internal_degree
        self.diffs = {}
        for i, m in (diffs or {}).items():
            i = int(i)
            if m.shape != (self.rank(i + 1), self.rank(i)):
                raise GeneratorError(f"differential at degree {i} has shape {m.shape}, "
                                     f"expected {(self.rank(i + 1), self.rank(i))}")
            if not m.is_zero():
                self.diffs[i] = m
        if any(r < 0 for r in self.ranks.values()):
            raise GeneratorError("negative rank")
        for i in self.diffs:
            if i + 1 in self.diffs and not (self.diffs[i + 1] @ self.diffs[i]).is_zero():
                raise GeneratorError(f"d^2 != 0 at degree {i}")

    def rank(self, i):
        return self.ranks.get(i, 0)

    def degrees(self):
        return sorted(self.ranks)

    def d(self, i) -> Matrix:
        m = self.diffs.get(i)
        return m if m is not None else Matrix(self.field, self.rank(i + 1), self.rank(i))

    @property
    def length(self):
        """n for a complex living in degrees -n..0."""
        degs = self.degrees()
        return -min(degs) if degs else 0

    def to_json(self):
        f = self.field.format
        return {
            "ranks": {str(i): r for i, r in sorted(self.ranks.items())},
            "diffs": {str(i): [[f(x) for x in row] for row in m.to_rows()]
                      for i, m in sorted(self.diffs.items())},
        }

    @classmethod
    def from_json(cls, field, obj, internal_degree=2):
        ranks = {int(i): int(r) for i, r in obj.get("ranks", {}).items()}
        diffs = {}
        for i, rows in obj.get("diffs", {}).items():
            i = int(i)
            diffs[i] = Matrix.from_rows(field, rows, ncols=ranks.get(i, 0))
        return cls(field, ranks, diffs, internal_degree)

    def with_field(self, field, embed=lambda x: x):
        return GeneratorComplex(field, self.ranks,
                                {i: m.map_entries(embed, field) for i, m in self.diffs.items()},
                                self.internal_degree)


def random_generator_complex(field, rng, max_length=2, max_rank=2, min_total=1):
    """Random complex in degrees -n..0 with n <= max_length, ranks <= max_rank.

    Differentials are built from degree 0 downwards; each one is a random combination
    of kernel vectors of the next, so d^2 = 0 by construction.
    """
    while True:
        n = rng.randint(0, max_length)
        ranks = {-k: rng.randint(0, max_rank) for k in range(n + 1)}
        if sum(ranks.values()) >= min_total:
            break
    diffs = {}
    for i in range(-1, -n - 1, -1):
        src, tgt = ranks[i], ranks[i + 1]
        if not src or not tgt:
            continue
        nxt = diffs.get(i + 1)
        basis = kernel(nxt) if nxt is not None else Matrix.identity(field, tgt)
        cols = []
        for _ in range(src):
            v = {}
            for col in basis.cols:
                c = field.random(rng)
                for r, x in col.items():
                    v[r] = field.add(v.get(r, 0), field.mul(c, x))
            cols.append(v)
        diffs[i] = Matrix.from_columns(field, tgt, cols)
    return GeneratorComplex(field, ranks, diffs)


class GeneratorMap:
    """Chain map between generator complexes: blocks[i] maps V^i of source to target."""

    def __init__(self, source: GeneratorComplex, target: GeneratorComplex, blocks):
        self.source = source
        self.target = target
        self.field = source.field
        self.blocks = {}
        for i in sorted(set(source.degrees()) | set(target.degrees())):
            m = blocks.get(i)
            if m is None:
                m = Matrix(self.field, target.rank(i), source.rank(i))
            if m.shape != (target.rank(i), source.rank(i)):
                raise GeneratorError(f"map block at degree {i} has wrong shape {m.shape}")
            self.blocks[i] = m
        for i in self.blocks:
            lhs = self.target.d(i) @ self.block(i)
            rhs = self.block(i + 1) @ self.source.d(i)
            if lhs != rhs:
                raise GeneratorError(f"not a chain map at degree {i}")

    def block(self, i):
        m = self.blocks.get(i)
        return m if m is not None else Matrix(self.field, self.target.rank(i), self.source.rank(i))


def build_Y(X: GeneratorComplex) -> GeneratorComplex:
    """The shifted dual: Y^i = (V^{1-i})^dual, with d_Y(y)(v) = (-1)^|y| y(d_X v)."""
    if X.internal_degree != 2:
        raise GeneratorError("build_Y expects a complex in internal degree 2")
    f = X.field
    ranks = {1 - i: r for i, r in X.ranks.items()}
    diffs = {}
    for i in ranks:
        # d_Y: Y^i = (V^{1-i})^dual -> Y^{i+1} = (V^{-i})^dual pairs with d_X: V^{-i} -> V^{1-i}
        diffs[i] = X.d(-i).transpose().scale(f.sign(i))
    return GeneratorComplex(f, ranks, diffs, internal_degree=-X.internal_degree)


def dual_generator_map(phi: GeneratorMap, Y_source=None, Y_target=None) -> GeneratorMap:
    """psi = phi^dual between the Y complexes, running the opposite way."""
    Ys = Y_target or build_Y(phi.target)
    Yt = Y_source or build_Y(phi.source)
    blocks = {i: phi.block(1 - i).transpose() for i in Ys.degrees()}
    return GeneratorMap(Ys, Yt, blocks)


@dataclass(frozen=True)
class Generator:
    label: str
    c: int  # cohomological degree
    t: int  # internal degree
    comp: int  # degree of the component of the generator complex it comes from
    index: int  # index inside that component

    @property
    def parity(self):
        return self.c % 2

    @property
    def bidegree(self):
        return (self.c, self.t)


class SymDgAlgebra:
    def __init__(self, field: FieldSpec, generators, gen_diff, name="A"):
        order = sorted(range(len(generators)), key=lambda k: (generators[k].c, generators[k].index,
                                                              generators[k].comp))
        if order != list(range(len(generators))):
            raise GeneratorError("generators must be listed in normal order")
        self.field = field
        self.name = name
        self.generators = list(generators)
        self.gen_diff = [dict(g) for g in gen_diff]
        self.ngens = len(self.generators)
        self.odd = [k for k, g in enumerate(self.generators) if g.parity]
        self.labels = {g.label: k for k, g in enumerate(self.generators)}
        self.by_component = {(g.comp, g.index): k for k, g in enumerate(self.generators)}
        ts = {g.t for g in self.generators}
        if 0 in ts:
            raise GeneratorError("generators of internal degree 0 are not supported")
        if len({t > 0 for t in ts}) > 1:
            raise GeneratorError("generator internal degrees must share a sign")
        self.direction = (1 if ts and min(ts) > 0 else -1) if ts else 0
        for k, dg in enumerate(self.gen_diff):
            g = self.generators[k]
            for h in dg:
                if self.generators[h].bidegree != (g.c + 1, g.t):
                    raise GeneratorError(f"gen_diff of {g.label} has wrong bidegree")
        self._basis = {}
        self._index = {}
        self._dcache = {}
        self._lcache = {}
        self.unit = (0,) * self.ngens

    @property
    def finite(self):
        """True when every generator is odd, so the algebra is finite-dimensional."""
        return all(g.parity for g in self.generators)

    def __repr__(self):
        gens = ", ".join(f"{g.label}{g.bidegree}" for g in self.generators)
        return f"SymDgAlgebra({self.name} over {self.field}: {gens})"

    # ---- bases -----------------------------------------------------------

    def _fill(self, j):
        if j in self._basis:
            return
        gens = self.generators
        out = {}
        n = self.ngens
        if n == 0 or self.direction == 0:
            if j == 0:
                out[0] = [self.unit]
        elif j * self.direction >= 0:
            exps = [0] * n

            def rec(k, rem, c):
                if k == n:
                    if rem == 0:
                        out.setdefault(c, []).append(tuple(exps))
                    return
                g = gens[k]
                e = 0
                while e * g.t * self.direction <= rem * self.direction:
                    exps[k] = e
                    rec(k + 1, rem - e * g.t, c + e * g.c)
                    e += 1
                    if g.parity and e > 1:
                        break
                exps[k] = 0

            rec(0, j, 0)
        for c in out:
            out[c].sort(reverse=True)
        self._basis[j] = out
        self._index[j] = {c: {m: p for p, m in enumerate(ms)} for c, ms in out.items()}

    def monomials(self, c, t):
        self._fill(t)
        return self._basis[t].get(c, [])

    def index(self, c, t):
        self._fill(t)
        return self._index[t].get(c, {})

    def degrees(self, t):
        self._fill(t)
        return sorted(self._basis[t])

    def dim(self, c, t):
        return len(self.monomials(c, t))

    def degree_of(self, m):
        c = t = 0
        for e, g in zip(m, self.generators):
            if e:
                c += e * g.c
                t += e * g.t
        return c, t

    def gen_monomial(self, k):
        m = [0] * self.ngens
        m[k] = 1
        return tuple(m)

    # ---- products ----------------------------------------------------------

    def multiply(self, a, b):
        """Normal-ordered a*b as (sign parity, monomial), or None when it vanishes."""
        s = 0
        for k in self.odd:
            if b[k]:
                if a[k]:
                    return None
                for l in self.odd:
                    if l > k and a[l]:
                        s += 1
        return s & 1, tuple(x + y for x, y in zip(a, b))

    def mul_elements(self, u: dict, v: dict) -> dict:
        f = self.field
        out = {}
        for a, x in u.items():
            for b, y in v.items():
                r = self.multiply(a, b)
                if r is None:
                    continue
                s, m = r
                z = f.mul(x, y)
                if s:
                    z = f.neg(z)
                out[m] = f.add(out.get(m, 0), z)
        return {m: x for m, x in out.items() if x != 0}

    def diff(self, m) -> dict:
        """Graded Leibniz expansion of d(m)."""
        f = self.field
        gens = self.generators
        out = {}
        passed = 0
        for l, e in enumerate(m):
            if not e:
                continue
            dg = self.gen_diff[l]
            if dg:
                prefix = list(m[:l + 1]) + [0] * (self.ngens - l - 1)
                prefix[l] -= 1
                suffix = [0] * (l + 1) + list(m[l + 1:])
                coeff = f(e)
                if passed & 1:
                    coeff = f.neg(coeff)
                if coeff != 0:
                    for h, x in dg.items():
                        r1 = self.multiply(tuple(prefix), self.gen_monomial(h))
                        if r1 is None:
                            continue
                        r2 = self.multiply(r1[1], tuple(suffix))
                        if r2 is None:
                            continue
                        z = f.mul(coeff, x)
                        if (r1[0] + r2[0]) & 1:
                            z = f.neg(z)
                        out[r2[1]] = f.add(out.get(r2[1], 0), z)
            passed += e * gens[l].c
        return {k: x for k, x in out.items() if x != 0}

    def diff_element(self, u: dict) -> dict:
        f = self.field
        out = {}
        for m, x in u.items():
            for k, y in self.diff(m).items():
                out[k] = f.add(out.get(k, 0), f.mul(x, y))
        return {k: x for k, x in out.items() if x != 0}

    def d(self, c, t) -> Matrix:
        key = (c, t)
        m = self._dcache.get(key)
        if m is None:
            src, tgt = self.monomials(c, t), self.index(c + 1, t)
            b = Builder(self.field, len(tgt), len(src))
            for col, mono in enumerate(src):
                for k, x in self.diff(mono).items():
                    b.add(tgt[k], col, x)
            m = b.build()
            self._dcache[key] = m
        return m

    def left_mult(self, k, c, t) -> Matrix:
        """Left multiplication by generator k from bidegree (c, t)."""
        key = (k, c, t)
        m = self._lcache.get(key)
        if m is None:
            g = self.generators[k]
            src, tgt = self.monomials(c, t), self.index(c + g.c, t + g.t)
            b = Builder(self.field, len(tgt), len(src))
            gm = self.gen_monomial(k)
            for col, mono in enumerate(src):
                r = self.multiply(gm, mono)
                if r is not None:
                    b.add(tgt[r[1]], col, self.field.sign(r[0]))
            m = b.build()
            self._lcache[key] = m
        return m

    def gen_diff_element(self, k) -> dict:
        return {self.gen_monomial(h): x for h, x in self.gen_diff[k].items()}

    def generator_table(self):
        """(label-free) description used to compare algebras structurally."""
        return [(g.c, g.t, tuple(sorted(self.gen_diff[k].items()))) for k, g in enumerate(self.generators)]

    def with_field(self, field, embed=lambda x: x, name=None):
        gd = [{h: embed(x) for h, x in dg.items()} for dg in self.gen_diff]
        return SymDgAlgebra(field, self.generators, gd, name or self.name)


def build_algebra(G: GeneratorComplex, shift: int = 0, prefix="x", name=None) -> SymDgAlgebra:
    """Sym(G[shift]): a basis vector of V^i becomes a generator in degree (i - shift, t)."""
    f = G.field
    gens = []
    for i in G.degrees():
        for k in range(G.rank(i)):
            gens.append(Generator(f"{prefix}{i - shift}_{k}", i - shift, G.internal_degree, i, k))
    gens.sort(key=lambda g: (g.c, g.index))
    pos = {(g.comp, g.index): n for n, g in enumerate(gens)}
    s = f.sign(shift)
    gen_diff = []
    for g in gens:
        col = G.d(g.comp).cols[g.index] if G.rank(g.comp + 1) else {}
        gen_diff.append({pos[(g.comp + 1, r)]: f.mul(s, x) for r, x in col.items()})
    return SymDgAlgebra(f, gens, gen_diff, name or prefix)


class AlgebraMorphism:
    def __init__(self, source: SymDgAlgebra, target: SymDgAlgebra, gen_images):
        self.source = source
        self.target = target
        self.gen_images = [{h: x for h, x in img.items() if x != 0} for img in gen_images]
        if len(self.gen_images) != source.ngens:
            raise GeneratorError("one image per source generator required")
        for k, img in enumerate(self.gen_images):
            for h in img:
                if target.generators[h].bidegree != source.generators[k].bidegree:
                    raise GeneratorError("algebra morphism must preserve bidegrees")
        self._cache = {}
        for k in range(source.ngens):
            lhs = self.apply_element(source.gen_diff_element(k))
            rhs = target.diff_element({target.gen_monomial(h): x for h, x in self.gen_images[k].items()})
            if lhs != rhs:
                raise GeneratorError(f"morphism does not commute with d on {source.generators[k].label}")

    def apply(self, m) -> dict:
        r = self._cache.get(m)
        if r is not None:
            return r
        T = self.target
        out = {T.unit: T.field.one}
        for k, e in enumerate(m):
            img = {T.gen_monomial(h): x for h, x in self.gen_images[k].items()}
            for _ in range(e):
                out = T.mul_elements(out, img)
                if not out:
                    break
            if not out:
                break
        self._cache[m] = out
        return out

    def apply_element(self, u: dict) -> dict:
        f = self.target.field
        out = {}
        for m, x in u.items():
            for k, y in self.apply(m).items():
                out[k] = f.add(out.get(k, 0), f.mul(x, y))
        return {k: x for k, x in out.items() if x != 0}

    def is_identity(self):
        return all(img == {k: self.target.field.one} for k, img in enumerate(self.gen_images))


def sym_morphism(phi: GeneratorMap, source: SymDgAlgebra | None = None,
                 target: SymDgAlgebra | None = None, shift=0) -> AlgebraMorphism:
    """Sym(phi) between algebras built from phi's source and target complexes."""
    source = source or build_algebra(phi.source, shift)
    target = target or build_algebra(phi.target, shift)
    images = []
    for g in source.generators:
        col = phi.block(g.comp).cols[g.index]
        images.append({target.by_component[(g.comp, r)]: x for r, x in col.items()})
    return AlgebraMorphism(source, target, images)


def regrade_xi(A_S: SymDgAlgebra, prefix="r", name="R"):
    """Relabel an algebra generated in internal degree -2: (c, t) moves to (c + t, t)."""
    if any(g.t != -2 for g in A_S.generators):
        raise GeneratorError("regrade_xi expects generators in internal degree -2")
    gens = [Generator(f"{prefix}{g.c + g.t}_{g.index}", g.c + g.t, g.t, g.comp, g.index)
            for g in A_S.generators]
    return SymDgAlgebra(A_S.field, gens, A_S.gen_diff, name), xi_index


def xi_index(b):
    i, j = b
    return (i + j, j)


def xi_inverse_index(b):
    i, j = b
    return (i - j, j)
