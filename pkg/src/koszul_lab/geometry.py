"""Linear-algebra data behind the duality: subspaces F1, F2 of a vector space E,
morphisms between such data, and base change along a finite field extension.

Everything lives over a point, so properness and finite Tor-dimension hold
automatically for every map considered here.
"""

from __future__ import annotations

import itertools
from math import comb
from dataclasses import dataclass, field as dc_field

from .bigraded import CohomologyTable, Window, cohomology, is_quasi_iso
from .dgmod import (DgModule, DgModuleMap, DualModule, ModuleError, dualize, extend_scalars,
                    restrict_scalars, semifree_resolution)
from .fields import FieldSpec, prime_field
from .koszul import KoszulContext, functor_A, kappa
from .linalg import Builder, Matrix, kernel, rank, solve
from .symdg import AlgebraMorphism, GeneratorComplex, GeneratorMap, dual_generator_map, sym_morphism


class SetupError(ValueError):
    pass


# ---- subspace data ------------------------------------------------------------------


@dataclass
class SubbundleSetup:
    field: FieldSpec
    dim_E: int
    F1: Matrix  # columns span F1 inside E
    F2: Matrix

    def __post_init__(self):
        for name, m in (("F1", self.F1), ("F2", self.F2)):
            if m.nrows != self.dim_E:
                raise SetupError(f"{name} has {m.nrows} rows but dim E = {self.dim_E}")
            if rank(m) != m.ncols:
                raise SetupError(f"{name} columns are not independent")

    @classmethod
    def from_json(cls, fld, obj):
        n = int(obj["dim_E"])

        def cols(key):
            rows = obj.get(key) or []
            if not rows:
                return Matrix(fld, n, 0)
            return Matrix.from_rows(fld, rows)

        return cls(fld, n, cols("F1"), cols("F2"))

    def to_json(self):
        fmt = self.field.format
        return {"dim_E": self.dim_E,
                "F1": [[fmt(x) for x in r] for r in self.F1.to_rows()],
                "F2": [[fmt(x) for x in r] for r in self.F2.to_rows()]}


def orthogonal(F: Matrix) -> Matrix:
    """Basis (columns, in dual coordinates) of the functionals vanishing on the columns of F."""
    return kernel(F.transpose()) if F.ncols else Matrix.identity(F.field, F.nrows)


def build_X_lkd(s: SubbundleSetup) -> GeneratorComplex:
    """F1^perp in degree -1 mapping to F2^dual in degree 0 by restriction of functionals."""
    K = orthogonal(s.F1)
    restr = s.F2.transpose() @ K  # row r: value of each functional on the r-th basis vector of F2
    return GeneratorComplex(s.field, {-1: K.ncols, 0: s.F2.ncols}, {-1: restr})


def dual_setup(s: SubbundleSetup) -> SubbundleSetup:
    return SubbundleSetup(s.field, s.dim_E, orthogonal(s.F1), orthogonal(s.F2))


def derived_intersection_cohomology(s: SubbundleSetup, w: Window) -> CohomologyTable:
    ctx = KoszulContext(build_X_lkd(s))
    return cohomology(ctx.free("T"), w, check=False)


def tor_oracle(s: SubbundleSetup, w: Window) -> CohomologyTable:
    """Graded Tor of the two coordinate rings over Sym(E^dual), computed directly.

    Resolve k[F1] by the Koszul complex on a basis of F1^perp and restrict to F2:
    the complex is Lambda^a(F1^perp) (x) Sym^b(F2^dual) at bidegree (-a, 2a + 2b).
    """
    f = s.field
    K = orthogonal(s.F1)
    restr = (s.F2.transpose() @ K).to_rows()  # restr[r][c]: c-th functional on r-th F2 vector
    p, q = K.ncols, s.F2.ncols
    dims = {}

    def wedge(a):
        return list(itertools.combinations(range(p), a))

    def sym(b):
        out = []
        for combo in itertools.combinations_with_replacement(range(q), b):
            e = [0] * q
            for v in combo:
                e[v] += 1
            out.append(tuple(e))
        return sorted(out)

    for j in w:
        if j < 0 or j % 2:
            continue
        total = j // 2
        blocks = {}
        for a in range(0, min(p, total) + 1):
            blocks[a] = (wedge(a), sym(total - a))
        ranks = {}
        for a in range(1, min(p, total) + 1):
            src_w, src_s = blocks[a]
            tgt_w, tgt_s = blocks[a - 1]
            tidx = {(x, y): n for n, (x, y) in enumerate(itertools.product(tgt_w, tgt_s))}
            b = Builder(f, len(tidx), len(src_w) * len(src_s))
            col = 0
            for x in src_w:
                for y in src_s:
                    for pos, c in enumerate(x):
                        sign = f.sign(pos)
                        rest = x[:pos] + x[pos + 1:]
                        for r in range(q):
                            val = restr[r][c]
                            if val == 0:
                                continue
                            yy = list(y)
                            yy[r] += 1
                            b.add(tidx[(rest, tuple(yy))], col, f.mul(sign, val))
                    col += 1
            ranks[a] = rank(b.build())
        for a, (ws, ss) in blocks.items():
            n = len(ws) * len(ss)
            h = n - ranks.get(a, 0) - ranks.get(a + 1, 0)
            if h:
                dims[(-a, j)] = h
    return CohomologyTable(dims, w)


def honest_intersection_dims(s: SubbundleSetup, w: Window):
    """dim Sym^m((F1 cap F2)^dual) at internal degree 2m, for comparison with the H^0 row."""
    both = Matrix(s.field, s.dim_E, s.F1.ncols + s.F2.ncols, s.F1.cols + s.F2.cols)
    d = s.F1.ncols + s.F2.ncols - rank(both)
    out = {}
    for j in w:
        if j >= 0 and j % 2 == 0:
            m = j // 2
            out[j] = comb(d + m - 1, m) if d else int(m == 0)
    return out


def reflect_internal(t: CohomologyTable, w: Window) -> CohomologyTable:
    return CohomologyTable({(b.i, -b.j): n for b, n in t.dims.items()}, w)


def exchange_report(s: SubbundleSetup, w: Window):
    """Compare kappa of the structure module and of k with the data of the dual setup.

    kappa(k) is the function algebra R, whose generators are F2 in degree -1 and
    E/F1 in degree 0: the derived intersection of the swapped orthogonals. By the
    symmetry of Tor its table is the dual setup's table reflected in j.
    """
    ctx = KoszulContext(build_X_lkd(s))
    neg = Window(-w.j_max, -w.j_min) if w.j_min >= 0 else w
    pos = Window(-neg.j_max, -neg.j_min)
    k_side = cohomology(kappa(ctx, ctx.trivial("T")), neg, check=False)
    dual_side = reflect_internal(derived_intersection_cohomology(dual_setup(s), pos), neg)
    free_side = cohomology(kappa(ctx, ctx.free("T")), neg, check=False)
    unit_table = CohomologyTable({(0, 0): 1}, neg)
    return {
        "kappa(k) vs dual setup": {"pass": k_side == dual_side, "lhs": k_side.records(),
                                   "rhs": dual_side.records()},
        "kappa(T) vs k": {"pass": free_side == unit_table, "lhs": free_side.records(),
                          "rhs": unit_table.records()},
    }


# ---- morphisms ------------------------------------------------------------------------


@dataclass
class BundleMorphismSetup:
    source: SubbundleSetup
    target: SubbundleSetup
    phi: Matrix  # E -> E'

    def __post_init__(self):
        if self.phi.shape != (self.target.dim_E, self.source.dim_E):
            raise SetupError("phi must be a dim E' x dim E matrix")
        for name, F, Fp in (("F1", self.source.F1, self.target.F1),
                            ("F2", self.source.F2, self.target.F2)):
            if F.ncols and solve(Fp, self.phi @ F) is None:
                raise SetupError(f"phi({name}) is not contained in {name}'")


def _coords(basis: Matrix, vectors: Matrix) -> Matrix:
    if not vectors.ncols:
        return Matrix(basis.field, basis.ncols, 0)
    x = solve(basis, vectors)
    if x is None:
        raise SetupError("vector outside the expected subspace")
    return x


def generator_chain_map(b: BundleMorphismSetup, X_src=None, X_tgt=None) -> GeneratorMap:
    """The chain map X' -> X induced by phi: transpose on F1'^perp, restriction on F2'^dual."""
    s, t = b.source, b.target
    X = X_src or build_X_lkd(s)
    Xp = X_tgt or build_X_lkd(t)
    K, Kp = orthogonal(s.F1), orthogonal(t.F1)
    deg_m1 = _coords(K, b.phi.transpose() @ Kp)
    # phi restricted to F2 in the chosen bases; dual map is its transpose
    restr = _coords(t.F2, b.phi @ s.F2)
    deg_0 = restr.transpose()
    return GeneratorMap(Xp, X, {-1: deg_m1, 0: deg_0})


@dataclass
class MorphismData:
    ctx: KoszulContext  # on the source setup (E, F1, F2)
    ctx_p: KoszulContext  # on the target setup (E', F1', F2')
    Phi: AlgebraMorphism  # T' -> T
    Psi: AlgebraMorphism  # R -> R'


def phi_functors(b: BundleMorphismSetup) -> MorphismData:
    ctx = KoszulContext(build_X_lkd(b.source))
    ctx_p = KoszulContext(build_X_lkd(b.target))
    chain = generator_chain_map(b, ctx.X, ctx_p.X)
    Phi = sym_morphism(chain, ctx_p.T, ctx.T)
    psi = dual_generator_map(chain, Y_source=ctx_p.Y, Y_target=ctx.Y)
    Psi = sym_morphism(psi, ctx.R, ctx_p.R)
    return MorphismData(ctx, ctx_p, Phi, Psi)


def _kappa_input_window(M: DgModule, w: Window) -> Window:
    """Internal degrees of M that kappa(M) reads on the output window w."""
    lo = M.j_lo if M.j_lo is not None else w.j_min
    return Window(min(lo, -w.j_max), max(lo, -w.j_min))


def check_morphism_compat(b: BundleMorphismSetup, w: Window, M: DgModule | None = None,
                          M_prime: DgModule | None = None, data: MorphismData | None = None):
    """Both sides of the two compatibilities, as cohomology tables on w.

    (i)  L Psi^* kappa(M) against kappa'(Phi_* M), for M over T;
    (ii) kappa(L Phi^* M') against Psi_* kappa'(M'), for M' over T'.
    """
    data = data or phi_functors(b)
    ctx, ctx_p = data.ctx, data.ctx_p
    report = {"window": str(w), "properness": "automatic over a point", "checks": []}
    if M is not None:
        P, _ = semifree_resolution(kappa(ctx, M), w)
        lhs = cohomology(extend_scalars(data.Psi, P), w, check=False)
        rhs = cohomology(kappa(ctx_p, restrict_scalars(data.Phi, M)), w, check=False)
        report["checks"].append(_cmp("(i) L Psi^* kappa = kappa' R Phi_*", lhs, rhs))
    if M_prime is not None:
        P, _ = semifree_resolution(M_prime, _kappa_input_window(M_prime, w))
        lhs = cohomology(kappa(ctx, extend_scalars(data.Phi, P)), w, check=False)
        rhs = cohomology(restrict_scalars(data.Psi, kappa(ctx_p, M_prime)), w, check=False)
        report["checks"].append(_cmp("(ii) kappa L Phi^* = R Psi_* kappa'", lhs, rhs))
    report["pass"] = all(c["pass"] for c in report["checks"])
    return report


def _cmp(name, lhs: CohomologyTable, rhs: CohomologyTable):
    return {"check": name, "pass": lhs == rhs, "lhs": lhs.records(), "rhs": rhs.records()}


# ---- base change along a finite field extension -----------------------------------------


@dataclass
class BaseChangeSetup:
    base: FieldSpec
    ext: FieldSpec
    lam: tuple = dc_field(default=None)  # values of lambda on the power basis 1, x, x^2, ...

    def __post_init__(self):
        if self.base.kind == "rationals" or self.base.characteristic != self.ext.characteristic:
            raise SetupError("base change needs finite fields of the same characteristic")
        if self.base != self.ext and self.base != prime_field(self.base.p):
            raise SetupError("the base field must be the prime field")
        if self.lam is None:
            lam = tuple(self.ext.trace(self.basis_element(s)) for s in range(self.degree))
        else:
            lam = tuple(self.base.parse(x) if not self.base.contains(x) else x for x in self.lam)
        if len(lam) != self.degree or not any(lam):
            raise SetupError("lambda must be a nonzero functional on the extension")
        object.__setattr__(self, "lam", lam)

    @property
    def degree(self):
        return 1 if self.base == self.ext else self.ext.degree

    def basis_element(self, s):
        return self.ext.one if s == 0 else self.ext.generator_power(s)

    def coords(self, a):
        if self.degree == 1:
            return [a]
        return self.ext.digits(a)

    def mult_matrix(self, a):
        """Matrix over the base of multiplication by a in the power basis."""
        d, E = self.degree, self.ext
        cols = []
        for s in range(d):
            v = self.coords(E.mul(a, self.basis_element(s)))
            cols.append({r: x for r, x in enumerate(v) if x})
        return cols

    def functional(self, a):
        f = self.base
        out = f.zero
        for c, l in zip(self.coords(a), self.lam):
            out = f.add(out, f.mul(c, l))
        return out


class FieldExtendedModule(DgModule):
    """M (x)_k k' over the same algebra with scalars extended."""

    def __init__(self, M: DgModule, algebra):
        super().__init__(algebra)
        self.M = M
        self.j_lo, self.j_hi = M.j_lo, M.j_hi

    def _degrees(self, j):
        return self.M.degrees(j)

    def dim(self, i, j):
        return self.M.dim(i, j)

    def _diff(self, i, j):
        return self.M.d(i, j).map_entries(lambda x: x, self.field)

    def _act(self, k, i, j):
        return self.M.act(k, i, j).map_entries(lambda x: x, self.field)


class FieldRestrictedModule(DgModule):
    """A k'-module viewed over k: each basis vector e becomes x^s e for the power basis."""

    def __init__(self, M: DgModule, algebra, bc: BaseChangeSetup):
        super().__init__(algebra)
        self.M, self.bc = M, bc
        self.j_lo, self.j_hi = M.j_lo, M.j_hi

    def _degrees(self, j):
        return self.M.degrees(j)

    def dim(self, i, j):
        return self.M.dim(i, j) * self.bc.degree

    def _expand(self, m: Matrix):
        d = self.bc.degree
        b = Builder(self.field, m.nrows * d, m.ncols * d)
        for c, col in enumerate(m.cols):
            for r, a in col.items():
                for s, mc in enumerate(self.bc.mult_matrix(a)):
                    for t, x in mc.items():
                        b.add(r * d + t, c * d + s, x)
        return b.build()

    def _diff(self, i, j):
        return self._expand(self.M.d(i, j))

    def _act(self, k, i, j):
        return self._expand(self.M.act(k, i, j))


@dataclass
class BaseChangeData:
    bc: BaseChangeSetup
    ctx_Y: KoszulContext  # over the base field
    ctx_X: KoszulContext  # over the extension


def base_change_functors(bc: BaseChangeSetup, X: GeneratorComplex) -> BaseChangeData:
    if X.field != bc.base:
        raise SetupError("generator complex must be over the base field")
    return BaseChangeData(bc, KoszulContext(X), KoszulContext(X.with_field(bc.ext)))


def _side(data, M):
    for name, ctx in (("Y", data.ctx_Y), ("X", data.ctx_X)):
        for alg in ("T", "S", "R"):
            if M.algebra is getattr(ctx, alg):
                return name, alg
    raise ModuleError("module is not over an algebra of this base change")


def pullback(data: BaseChangeData, M: DgModule) -> DgModule:
    """Extension of scalars to k' (flat, so underived)."""
    _, alg = _side(data, M)
    return FieldExtendedModule(M, getattr(data.ctx_X, alg))


def pushforward(data: BaseChangeData, N: DgModule) -> DgModule:
    """Restriction of scalars to k (exact)."""
    _, alg = _side(data, N)
    return FieldRestrictedModule(N, getattr(data.ctx_Y, alg), data.bc)


def upper_shriek(data: BaseChangeData, M: DgModule) -> DgModule:
    """D_{pi^! Omega} o pi^* o D_Omega for a T-module over the base."""
    return dualize(pullback(data, dualize(M)))


def trace_comparison_map(data: BaseChangeData, N: DgModule) -> DgModuleMap:
    """pi_* D'(N) -> D(pi_* N), phi -> lambda o phi, for a T-module N over the extension."""
    bc = data.bc
    src = pushforward(data, DualModule(N))
    tgt = DualModule(pushforward(data, N))
    d = bc.degree
    f = bc.base
    # pairing value lambda(x^s * x^r)
    table = [[bc.functional(bc.ext.mul(bc.basis_element(s), bc.basis_element(r)))
              for r in range(d)] for s in range(d)]

    def block(i, j):
        n = N.dim(-i, -j)
        b = Builder(f, n * d, n * d)
        for q in range(n):
            for s in range(d):
                for r in range(d):
                    if table[s][r]:
                        b.add(q * d + r, q * d + s, table[s][r])
        return b.build()

    return DgModuleMap(src, tgt, block)


def check_base_change_compat(data: BaseChangeData, w: Window, M: DgModule | None = None,
                             N: DgModule | None = None):
    """All base change identities as exact table equalities on w.

    M is a T-module over the base (pullback side), N one over the extension
    (pushforward side). Tables over k' and k are compared as dimension tables.
    """
    bc = data.bc
    report = {"window": str(w), "flat": "finite field extensions are flat and finite",
              "lambda": [bc.base.format(x) for x in bc.lam], "checks": []}
    checks = report["checks"]
    if M is not None:
        lhs = cohomology(pullback(data, kappa(data.ctx_Y, M)), w, check=False)
        rhs = cohomology(kappa(data.ctx_X, upper_shriek(data, M)), w, check=False)
        checks.append(_cmp("pullback: L pi~^* kappa_Y = kappa_X pi^!", lhs, rhs))
        rhs2 = cohomology(kappa(data.ctx_X, pullback(data, M)), w, check=False)
        checks.append(_cmp("smooth pullback: L pi~^* kappa_Y = kappa_X L pi^*", lhs, rhs2))
        DM = dualize(M)
        a_lhs = cohomology(pullback(data, functor_A(data.ctx_Y, DM)), w, check=False)
        a_rhs = cohomology(functor_A(data.ctx_X, pullback(data, DM)), w, check=False)
        checks.append(_cmp("A commutes with pullback", a_lhs, a_rhs))
    if N is not None:
        lhs = cohomology(pushforward(data, kappa(data.ctx_X, N)), w, check=False)
        rhs = cohomology(kappa(data.ctx_Y, pushforward(data, N)), w, check=False)
        checks.append(_cmp("pushforward: R pi~_* kappa_X = kappa_Y R pi_*", lhs, rhs))
        dw = Window(-w.j_max, -w.j_min) if N.j_lo is not None and N.j_lo >= 0 else w
        lhs = cohomology(pushforward(data, DualModule(N)), dw, check=False)
        rhs = cohomology(DualModule(pushforward(data, N)), dw, check=False)
        checks.append(_cmp("duality: R pi_* D_X = D_Y R pi_*", lhs, rhs))
        cmp_map = trace_comparison_map(data, N)
        bad = cmp_map.violations(dw)
        ok = not bad and is_quasi_iso(cmp_map, dw)
        checks.append({"check": "duality comparison map lambda o - is a quasi-isomorphism",
                       "pass": ok, "witnesses": [list(x[1]) for x in bad[:5]]})
    report["pass"] = all(c["pass"] for c in checks)
    return report
