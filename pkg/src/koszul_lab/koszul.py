"""The Koszul duality functors between modules over T = Sym(X) and S = Sym(Y).

A(M) = S (x) M and B(N) = T^dual (x) N, each with the twisted differential built from
a basis {x_a} of X and its dual basis {x_a^*} of Y. K_Omega = A o D_Omega, and kappa
is K_Omega followed by the regrading onto R = Sym(Y[2]).
"""

from __future__ import annotations

from dataclasses import dataclass

from .bigraded import Window, cohomology
from .dgmod import (DgModule, DgModuleMap, DualModule, FiniteModule, ModuleError, RegradedModule,
                    SemiFreeModule, TwistedTensor, dualize)
from .linalg import Builder, Matrix
from .symdg import GeneratorComplex, build_algebra, build_Y, regrade_xi, xi_index


@dataclass(frozen=True)
class DualizingData:
    """Rank-one dualizing module k placed at ``degree``."""
    degree: tuple = (0, 0)


class KoszulContext:
    def __init__(self, X: GeneratorComplex, omega: DualizingData | None = None):
        self.X = X
        self.field = X.field
        self.omega = omega or DualizingData()
        self.Y = build_Y(X)
        self.T = build_algebra(X, 0, prefix="x", name="T")
        self.S = build_algebra(self.Y, 0, prefix="y", name="S")
        self.R, self.xi = regrade_xi(self.S, prefix="r", name="R")
        # (index in S of x_a^*, index in T of x_a) for every basis vector x_a of X
        self.pairs = []
        for k, g in enumerate(self.T.generators):
            self.pairs.append((self.S.by_component[(1 - g.comp, g.index)], k))
        self._free = {}

    def free(self, which):
        """The algebra T, S or R as a module over itself."""
        m = self._free.get(which)
        if m is None:
            A = {"T": self.T, "S": self.S, "R": self.R}[which]
            m = SemiFreeModule(A, [(0, 0)])
            self._free[which] = m
        return m

    def trivial(self, which, degree=(0, 0)):
        A = {"T": self.T, "S": self.S, "R": self.R}[which]
        return FiniteModule(A, {degree: 1})

    def T_dual(self):
        m = self._free.get("T^dual")
        if m is None:
            m = DualModule(self.free("T"))
            self._free["T^dual"] = m
        return m


def _bounded_above(M: DgModule, what):
    if M.j_hi is None:
        raise ModuleError(f"{what} needs internal degrees bounded above")


def functor_A(ctx: KoszulContext, M: DgModule) -> TwistedTensor:
    if M.algebra is not ctx.T:
        raise ModuleError("A takes modules over T")
    if not (ctx.S.finite and M.j_lo is not None):
        # with S finite-dimensional a lower bound on M is enough
        _bounded_above(M, "A")
    return TwistedTensor(ctx.free("S"), M, ctx.pairs)


def functor_B(ctx: KoszulContext, N: DgModule) -> TwistedTensor:
    if N.algebra is not ctx.S:
        raise ModuleError("B takes modules over S")
    _bounded_above(N, "B")
    return TwistedTensor(ctx.T_dual(), N, [(t, s) for s, t in ctx.pairs])


def koszul_K1(ctx: KoszulContext):
    """K1 = A(T^dual) with its augmentation onto k at (0, 0)."""
    k = ctx.trivial("S")
    K1 = functor_A(ctx, ctx.T_dual())
    f = ctx.field

    def block(i, j):
        if (i, j) == (0, 0):
            # K1 at (0,0) is spanned by 1 (x) 1^dual
            return Matrix(f, 1, 1, [{0: f.one}])
        return Matrix(f, k.dim(i, j), K1.dim(i, j))

    return K1, DgModuleMap(K1, k, block)


def koszul_K2(ctx: KoszulContext):
    """K2 = B(S) with the coaugmentation k -> K2 at (0, 0)."""
    k = ctx.trivial("T")
    K2 = functor_B(ctx, ctx.free("S"))
    f = ctx.field

    def block(i, j):
        if (i, j) == (0, 0):
            return Matrix(f, K2.dim(0, 0), 1, [{0: f.one}])
        return Matrix(f, K2.dim(i, j), k.dim(i, j))

    return K2, DgModuleMap(k, K2, block)


def _floor_half_sign(f, j):
    return f.sign(j // 2)


def unit(ctx: KoszulContext, M: DgModule) -> DgModuleMap:
    """M -> B(A(M)), m -> sum over monomials t of +-(t^dual (x) 1 (x) t.m).

    The sign is (-1)^{|t| + wt(t) + floor(j_m / 2)}, wt(t) the number of generator
    factors. The j_m-dependent part is what makes the map both S-linear and a chain map.
    """
    AM = functor_A(ctx, M)
    BAM = functor_B(ctx, AM)
    T, f = ctx.T, ctx.field

    def block(i, j):
        n = M.dim(i, j)
        b = Builder(f, BAM.dim(i, j), n)
        if not n:
            return b.build()
        base = _floor_half_sign(f, j)
        for jt in range(0, M.j_hi - j + 1, 2):
            for c in T.degrees(jt):
                monos = T.monomials(c, jt)
                off_B = BAM.locate(i, j, -c, -jt)
                if off_B is None:
                    continue
                tgt_dim = M.dim(i + c, j + jt)
                if not tgt_dim:
                    continue
                off_A = AM.locate(i + c, j + jt, 0, 0)
                rdim = AM.dim(i + c, j + jt)
                s = f.mul(base, f.sign(c + jt // 2))
                for pos, t in enumerate(monos):
                    for q in range(n):
                        v = M.act_monomial(t, i, j, {q: f.one})
                        for r, x in v.items():
                            b.add(off_B + pos * rdim + off_A + r, q, f.mul(s, x))
        return b.build()

    return DgModuleMap(M, BAM, block)


def counit(ctx: KoszulContext, N: DgModule) -> DgModuleMap:
    """A(B(N)) -> N, s (x) phi (x) n -> (-1)^{floor(j_n / 2)} phi(1) s.n."""
    BN = functor_B(ctx, N)
    ABN = functor_A(ctx, BN)
    S, f = ctx.S, ctx.field
    Sfree = ctx.free("S")

    def block(i, j):
        b = Builder(f, N.dim(i, j), ABN.dim(i, j))
        entries = ABN.layout(j).get(i)
        if not entries:
            return b.build()
        for (iL, jL, iR, jR, off) in entries[0]:
            # iL, jL: the S-factor; (iR, jR) is a bidegree of B(N) = T^dual (x) N
            off_n = BN.locate(iR, jR, 0, 0)
            if off_n is None:
                continue
            nR = BN.dim(iR, jR)
            s = _floor_half_sign(f, jR)
            basis, _ = Sfree.basis(iL, jL)
            for ps, (mono, _e) in enumerate(basis):
                for q in range(N.dim(iR, jR)):
                    v = N.act_monomial(mono, iR, jR, {q: f.one})
                    col = off + ps * nR + off_n + q
                    for r, x in v.items():
                        b.add(r, col, f.mul(s, x))
        return b.build()

    return DgModuleMap(ABN, N, block)


def K_Omega(ctx: KoszulContext, M: DgModule) -> TwistedTensor:
    if M.algebra is not ctx.T:
        raise ModuleError("K_Omega takes modules over T")
    if M.j_lo is None:
        raise ModuleError("K_Omega needs internal degrees bounded below")
    return functor_A(ctx, dualize(M, ctx.omega))


def kappa(ctx: KoszulContext, M: DgModule) -> DgModule:
    return RegradedModule(K_Omega(ctx, M), ctx.R, +1)


def kappa_inv(ctx: KoszulContext, N: DgModule) -> DgModule:
    """D_Omega(B(xi^-1 N)) for an R-module N with internal degrees bounded above."""
    if N.algebra is not ctx.R:
        raise ModuleError("kappa_inv takes modules over R")
    _bounded_above(N, "kappa_inv")
    return dualize(functor_B(ctx, RegradedModule(N, ctx.S, -1)), ctx.omega)


def kappa_table(ctx, M, w: Window):
    return cohomology(kappa(ctx, M), w, check=False)


__all__ = ["DualizingData", "KoszulContext", "functor_A", "functor_B", "koszul_K1", "koszul_K2",
           "unit", "counit", "K_Omega", "kappa", "kappa_inv", "kappa_table", "xi_index"]
