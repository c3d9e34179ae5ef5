"""Exact base fields: the rationals, prime fields and small extensions of them.

Elements are plain Python values so the elimination loops stay cheap:

* rationals: ``gmpy2.mpq``
* prime field F_p: ``int`` in ``[0, p)``
* extension F_p[x]/(f): ``int`` code ``c0 + c1*p + c2*p^2 + ...`` of the
  residue polynomial ``c0 + c1 x + ...``; constants therefore embed as themselves.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from functools import cached_property

import gmpy2
from gmpy2 import mpq

RATIONALS = "rationals"
PRIME = "prime-field"
EXTENSION = "extension-field"

# largest extension order we tabulate; desk scale only
MAX_EXTENSION_ORDER = 1 << 12


class FieldError(ValueError):
    pass


def is_prime(p: int) -> bool:
    return p >= 2 and bool(gmpy2.is_prime(p))


def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_mod(a, f, p):
    """Remainder of a modulo the monic f, coefficients mod p (low degree first)."""
    a = [x % p for x in a]
    d = len(f) - 1
    for k in range(len(a) - 1, d - 1, -1):
        c = a[k]
        if c:
            for t in range(d + 1):
                a[k - d + t] = (a[k - d + t] - c * f[t]) % p
    return _poly_trim(a[:d])


def is_irreducible(f, p: int) -> bool:
    """Brute-force test: no monic factor of degree <= deg(f)/2 divides f."""
    d = len(f) - 1
    if d < 1:
        return False
    for k in range(1, d // 2 + 1):
        for low in itertools.product(range(p), repeat=k):
            g = list(low) + [1]
            if not _poly_mod(f, g, p):
                return False
    return True


@dataclass(frozen=True)
class FieldSpec:
    kind: str
    p: int = 0
    min_poly: tuple = ()

    def __post_init__(self):
        if self.kind == RATIONALS:
            return
        if self.kind not in (PRIME, EXTENSION):
            raise FieldError(f"unknown field kind {self.kind!r}")
        if not is_prime(self.p):
            raise FieldError("p not prime")
        if self.kind == EXTENSION:
            f = [int(c) % self.p for c in self.min_poly]
            if len(f) < 3 or f[-1] != 1:
                raise FieldError("min_poly must be monic of degree >= 2")
            if self.p ** (len(f) - 1) > MAX_EXTENSION_ORDER:
                raise FieldError("extension field too large")
            if not is_irreducible(f, self.p):
                raise FieldError("min_poly is not irreducible")
            object.__setattr__(self, "min_poly", tuple(f))

    # ---- descriptive -------------------------------------------------

    @property
    def characteristic(self) -> int:
        return 0 if self.kind == RATIONALS else self.p

    @property
    def degree(self) -> int:
        """Degree over the prime field."""
        return len(self.min_poly) - 1 if self.kind == EXTENSION else 1

    @property
    def order(self):
        return None if self.kind == RATIONALS else self.p ** self.degree

    def __str__(self):
        if self.kind == RATIONALS:
            return "Q"
        if self.kind == PRIME:
            return f"F_{self.p}"
        return f"F_{self.order}"

    def prime_subfield(self) -> FieldSpec:
        return prime_field(self.p) if self.kind == EXTENSION else self

    # ---- elements ----------------------------------------------------

    @property
    def zero(self):
        return mpq(0) if self.kind == RATIONALS else 0

    @property
    def one(self):
        return mpq(1) if self.kind == RATIONALS else 1

    def __call__(self, n: int):
        """Image of an integer."""
        if self.kind == RATIONALS:
            return mpq(n)
        return n % self.p

    def contains(self, a) -> bool:
        if self.kind == RATIONALS:
            return type(a) is type(mpq(0))
        if isinstance(a, bool) or not isinstance(a, int):
            return False
        return 0 <= a < (self.p if self.kind == PRIME else self.order)

    def add(self, a, b):
        if self.kind == RATIONALS:
            return a + b
        if self.kind == PRIME:
            return (a + b) % self.p
        return self._add_table[a][b]

    def neg(self, a):
        if self.kind == RATIONALS:
            return -a
        if self.kind == PRIME:
            return -a % self.p
        return self._neg_table[a]

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.kind == RATIONALS:
            return a * b
        if self.kind == PRIME:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        log = self._log
        return self._exp[(log[a] + log[b]) % (self.order - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        if self.kind == RATIONALS:
            return 1 / a
        if self.kind == PRIME:
            return pow(a, -1, self.p)
        return self._exp[(-self._log[a]) % (self.order - 1)]

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        r = self.one
        for _ in range(e):
            r = self.mul(r, a)
        return r

    def sign(self, parity: int):
        """(-1)^parity."""
        return self.one if parity % 2 == 0 else self.neg(self.one)

    # ---- extension-field internals -----------------------------------

    def digits(self, a):
        """Coefficient list [c0, c1, ...] of an element (length = degree)."""
        if self.kind == RATIONALS:
            raise FieldError("rationals have no digit expansion")
        out = []
        for _ in range(self.degree):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def from_digits(self, cs):
        if len(cs) > self.degree:
            cs = _poly_mod(list(cs), list(self.min_poly), self.p)
        a = 0
        for c in reversed(list(cs)):
            a = a * self.p + c % self.p
        return a

    def _poly_mul_code(self, a, b):
        x, y = self.digits(a), self.digits(b)
        prod = [0] * (len(x) + len(y) - 1)
        for s, c in enumerate(x):
            if c:
                for t, e in enumerate(y):
                    prod[s + t] += c * e
        return self.from_digits(_poly_mod(prod, list(self.min_poly), self.p))

    @cached_property
    def _add_table(self):
        q = self.order
        digs = [self.digits(a) for a in range(q)]
        return [[self.from_digits([(u + v) % self.p for u, v in zip(digs[a], digs[b])])
                 for b in range(q)] for a in range(q)]

    @cached_property
    def _neg_table(self):
        return [self.from_digits([-c % self.p for c in self.digits(a)]) for a in range(self.order)]

    @cached_property
    def _exp_log(self):
        q = self.order
        for g in range(2, q):
            exp = [1]
            x = g
            while x != 1:
                exp.append(x)
                x = self._poly_mul_code(x, g)
            if len(exp) == q - 1:
                log = [0] * q
                for k, e in enumerate(exp):
                    log[e] = k
                return exp, log
        raise FieldError("no primitive element found")  # unreachable for a field

    @property
    def _exp(self):
        return self._exp_log[0]

    @property
    def _log(self):
        return self._exp_log[1]

    def generator_power(self, k: int):
        """Code of x^k (the power basis element)."""
        if self.kind != EXTENSION:
            raise FieldError("power basis only for extension fields")
        return self.from_digits([0] * k + [1])

    def trace(self, a):
        """Trace down to the prime field: a + a^p + ... + a^(p^(d-1))."""
        t, x = 0, a
        for _ in range(self.degree):
            t = self.add(t, x)
            x = self.pow(x, self.p)
        return t

    # ---- serialization -----------------------------------------------

    def format(self, a) -> str:
        if self.kind == RATIONALS:
            a = mpq(a)
            if a.denominator == 1:
                return str(a.numerator)
            return f"{a.numerator}/{a.denominator}"
        if self.kind == PRIME:
            return str(a)
        return "[" + ",".join(str(c) for c in self.digits(a)) + "]"

    def parse(self, s):
        """Parse a scalar from its string form (ints are accepted too)."""
        if isinstance(s, bool):
            raise FieldError(f"not a scalar: {s!r}")
        if isinstance(s, int):
            return self(s)
        if isinstance(s, list):
            s = "[" + ",".join(str(c) for c in s) + "]"
        if not isinstance(s, str):
            raise FieldError(f"not a scalar: {s!r}")
        s = s.strip()
        try:
            if self.kind == RATIONALS:
                if s.startswith("["):
                    raise ValueError
                return mpq(s)
            if s.startswith("["):
                cs = [int(c) for c in s[1:-1].split(",") if c.strip()]
                if self.kind == PRIME:
                    if len(cs) != 1:
                        raise ValueError
                    return cs[0] % self.p
                return self.from_digits(cs)
            if "/" in s:
                num, den = s.split("/")
                return self.div(self(int(num)), self(int(den)))
            return self(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise FieldError(f"cannot parse {s!r} over {self}") from exc

    def random(self, rng: random.Random, bound: int = 3):
        if self.kind == RATIONALS:
            return mpq(rng.randint(-bound, bound))
        return rng.randrange(self.order)

    def to_json(self):
        if self.kind == RATIONALS:
            return {"type": "Q"}
        if self.kind == PRIME:
            return {"type": "Fp", "p": self.p}
        return {"type": "Fq", "p": self.p, "min_poly": list(self.min_poly)}


QQ = FieldSpec(RATIONALS)


def prime_field(p: int) -> FieldSpec:
    return FieldSpec(PRIME, p)


def extension_field(p: int, min_poly) -> FieldSpec:
    return FieldSpec(EXTENSION, p, tuple(min_poly))


def field_from_json(obj) -> FieldSpec:
    t = obj.get("type")
    if t in ("Q", "QQ", "rationals"):
        return QQ
    if t in ("Fp", "prime", "prime-field"):
        return prime_field(int(obj["p"]))
    if t in ("Fq", "extension", "extension-field"):
        return extension_field(int(obj["p"]), [int(c) for c in obj["min_poly"]])
    raise FieldError(f"unknown field type {t!r}")


def field_arith(spec: FieldSpec, op: str, a, b=None):
    """Checked scalar arithmetic; raises on foreign operands or zero inverse."""
    for x in (a,) if b is None else (a, b):
        if not spec.contains(x):
            raise FieldError(f"operand {x!r} does not belong to {spec}")
    if op == "add":
        return spec.add(a, b)
    if op == "mul":
        return spec.mul(a, b)
    if op == "neg":
        return spec.neg(a)
    if op == "inv":
        return spec.inv(a)
    raise FieldError(f"unknown op {op!r}")
