"""Prime fields, monomial orders and sparse multivariate polynomials.

Polynomials are immutable maps ``exponent tuple -> coefficient`` with
coefficients stored as canonical residues in ``[0, p)``.  Variables are
positional; a :class:`Ring` attaches display names and the monomial order
used for leading terms and for the canonical textual form.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations_with_replacement
from math import comb

from sympy import isprime

DEFAULT_PRIME = 32003


class FieldError(ArithmeticError):
    """Raised on inversion of zero."""


class RingMismatch(ValueError):
    """Raised when combining objects from different rings."""


@dataclass(frozen=True)
class PrimeField:
    p: int = DEFAULT_PRIME

    def __post_init__(self):
        if not isprime(self.p):
            raise ValueError(f"modulus {self.p} is not prime")
        if self.p >= 2 ** 31:
            raise ValueError("modulus must be below 2**31 for int64 linear algebra")

    def __call__(self, a: int) -> int:
        return a % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        a %= self.p
        if a == 0:
            raise FieldError("inverse of zero")
        return pow(a, self.p - 2, self.p)

    def sqrt(self, a):
        """A square root of ``a`` or None when ``a`` is a non-residue."""
        p = self.p
        a %= p
        if a == 0 or p == 2:
            return a
        if pow(a, (p - 1) // 2, p) != 1:
            return None
        # Tonelli-Shanks
        q, s = p - 1, 0
        while q % 2 == 0:
            q //= 2
            s += 1
        z = 2
        while pow(z, (p - 1) // 2, p) != p - 1:
            z += 1
        m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
        while t != 1:
            i, t2 = 0, t
            while t2 != 1:
                t2 = t2 * t2 % p
                i += 1
            b = pow(c, 1 << (m - i - 1), p)
            m, c = i, b * b % p
            t, r = t * c % p, r * b % p
        return r


# -- monomial orders ---------------------------------------------------------


def _drl(e):
    return (sum(e),) + tuple(-x for x in reversed(e))


@dataclass(frozen=True)
class MonomialOrder:
    """``degrevlex``, ``lex`` or ``block`` (eliminates the first ``k`` variables).

    Both blocks of a block order are compared by degrevlex.
    """

    kind: str = "degrevlex"
    k: int = 0

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "block"):
            raise ValueError(f"unknown monomial order {self.kind!r}")
        if self.kind == "block" and self.k < 1:
            raise ValueError("block order needs k >= 1")

    @property
    def name(self) -> str:
        return f"block{self.k}" if self.kind == "block" else self.kind

    @classmethod
    def parse(cls, name: str) -> MonomialOrder:
        m = re.fullmatch(r"block\(?(\d+)\)?", name)
        if m:
            return cls("block", int(m.group(1)))
        return cls(name)

    def key(self, e):
        if self.kind == "degrevlex":
            return _drl(e)
        if self.kind == "lex":
            return e
        return _drl(e[: self.k]) + _drl(e[self.k:])


DEGREVLEX = MonomialOrder()
LEX = MonomialOrder("lex")


def block(k: int) -> MonomialOrder:
    return MonomialOrder("block", k)


# -- monomial helpers ----------------------------------------------------------


def mono_mul(a, b):
    return tuple(x + y for x, y in zip(a, b))


def mono_div(a, b):
    return tuple(x - y for x, y in zip(a, b))


def mono_divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def mono_lcm(a, b):
    return tuple(max(x, y) for x, y in zip(a, b))


def mono_coprime(a, b):
    return all(x == 0 or y == 0 for x, y in zip(a, b))


@lru_cache(maxsize=None)
def monomials(n: int, d: int) -> tuple:
    """All exponent tuples of total degree ``d`` in ``n`` variables."""
    out = []
    for combo in combinations_with_replacement(range(n), d):
        e = [0] * n
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    return tuple(out)


def num_monomials(n: int, d: int) -> int:
    return comb(n + d - 1, d) if d >= 0 else 0


# -- rings and polynomials -----------------------------------------------------


class Ring:
    """Polynomial ring ``F_p[x0..x_{n-1}]`` with a monomial order."""

    def __init__(self, nvars: int, p: int = DEFAULT_PRIME, order="degrevlex", names=None):
        self.field = p if isinstance(p, PrimeField) else PrimeField(p)
        self.p = self.field.p
        self.nvars = nvars
        self.order = order if isinstance(order, MonomialOrder) else MonomialOrder.parse(order)
        self.names = tuple(names) if names else tuple(f"x{i}" for i in range(nvars))
        if len(self.names) != nvars:
            raise ValueError("one name per variable")
        self._keycache = {}
        self._name_index = {nm: i for i, nm in enumerate(self.names)}

    def key(self, e):
        k = self._keycache.get(e)
        if k is None:
            k = self._keycache[e] = self.order.key(e)
        return k

    def with_order(self, order) -> Ring:
        return Ring(self.nvars, self.field, order, self.names)

    def compatible(self, other: Ring) -> bool:
        return self.p == other.p and self.nvars == other.nvars

    def __eq__(self, other):
        return (isinstance(other, Ring) and self.compatible(other)
                and self.order == other.order and self.names == other.names)

    def __hash__(self):
        return hash((self.p, self.nvars, self.order, self.names))

    def __repr__(self):
        return f"Ring(p={self.p}, vars={self.names}, order={self.order.name})"

    # constructors
    def zero(self) -> Polynomial:
        return Polynomial(self, {})

    def one(self) -> Polynomial:
        return self.const(1)

    def const(self, c: int) -> Polynomial:
        c %= self.p
        return Polynomial(self, {(0,) * self.nvars: c} if c else {})

    def var(self, i: int) -> Polynomial:
        e = [0] * self.nvars
        e[i] = 1
        return Polynomial(self, {tuple(e): 1})

    def gens(self):
        return [self.var(i) for i in range(self.nvars)]

    def monomial(self, e, c=1) -> Polynomial:
        return Polynomial(self, {tuple(e): c})

    def from_terms(self, terms) -> Polynomial:
        p = self.p
        d = {}
        for e, c in terms.items() if isinstance(terms, dict) else terms:
            e = tuple(e)
            c = (d.get(e, 0) + c) % p
            if c:
                d[e] = c
            else:
                d.pop(e, None)
        return Polynomial(self, d)

    def linear_form(self, coeffs) -> Polynomial:
        n = self.nvars
        return self.from_terms(
            {tuple(int(i == j) for j in range(n)): int(c) for i, c in enumerate(coeffs) if int(c) % self.p}
        )

    def parse(self, text: str) -> Polynomial:
        """Inverse of :meth:`Polynomial.to_text`; also accepts ``-`` and bare variables."""
        text = text.replace(" ", "")
        if text in ("", "0"):
            return self.zero()
        terms = {}
        for sign, body in re.findall(r"([+-]?)([^+-]+)", text):
            c = 1
            e = [0] * self.nvars
            for factor in body.split("*"):
                if re.fullmatch(r"\d+", factor):
                    c *= int(factor)
                    continue
                name, _, power = factor.partition("^")
                if name not in self._name_index:
                    raise ValueError(f"unknown variable {name!r}")
                e[self._name_index[name]] += int(power) if power else 1
            if sign == "-":
                c = -c
            e = tuple(e)
            terms[e] = terms.get(e, 0) + c
        return self.from_terms(terms)

    def random_poly(self, rng, degree: int, homogeneous=True, density=1.0) -> Polynomial:
        degs = [degree] if homogeneous else range(degree + 1)
        terms = {}
        for d in degs:
            for e in monomials(self.nvars, d):
                if density >= 1.0 or rng.random() < density:
                    terms[e] = rng.randrange(self.p)
        return self.from_terms(terms)


class Polynomial:
    """Immutable sparse polynomial; ``terms`` never holds zero coefficients."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: dict):
        self.ring = ring
        self.terms = terms
        self._hash = None

    # structure
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def homogeneous_part(self, d: int) -> Polynomial:
        return Polynomial(self.ring, {e: c for e, c in self.terms.items() if sum(e) == d})

    def sorted_terms(self):
        key = self.ring.key
        return sorted(self.terms.items(), key=lambda t: key(t[0]), reverse=True)

    def lead_monomial(self):
        key = self.ring.key
        return max(self.terms, key=key)

    def lead_coeff(self) -> int:
        return self.terms[self.lead_monomial()]

    def monic(self) -> Polynomial:
        if not self.terms:
            return self
        inv = self.ring.field.inv(self.lead_coeff())
        return self.scale(inv)

    def scale(self, c: int) -> Polynomial:
        p = self.ring.p
        c %= p
        if c == 0:
            return self.ring.zero()
        return Polynomial(self.ring, {e: v * c % p for e, v in self.terms.items()})

    def mul_monomial(self, m, c=1) -> Polynomial:
        p = self.ring.p
        return Polynomial(self.ring, {tuple(a + b for a, b in zip(e, m)): v * c % p
                                      for e, v in self.terms.items()})

    def with_ring(self, ring: Ring) -> Polynomial:
        if not ring.compatible(self.ring):
            raise RingMismatch("incompatible ring")
        return Polynomial(ring, self.terms)

    # arithmetic
    def _check(self, other):
        if isinstance(other, int):
            return self.ring.const(other)
        if not isinstance(other, Polynomial):
            return NotImplemented
        if not self.ring.compatible(other.ring):
            raise RingMismatch(f"{self.ring} vs {other.ring}")
        return other

    def __add__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        d = dict(self.terms)
        for e, c in other.terms.items():
            v = (d.get(e, 0) + c) % p
            if v:
                d[e] = v
            else:
                d.pop(e, None)
        return Polynomial(self.ring, d)

    __radd__ = __add__

    def __neg__(self):
        p = self.ring.p
        return Polynomial(self.ring, {e: p - c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._check(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            return self.scale(other)
        other = self._check(other)
        if other is NotImplemented:
            return other
        p = self.ring.p
        d = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                d[e] = d.get(e, 0) + c1 * c2
        return Polynomial(self.ring, {e: c % p for e, c in d.items() if c % p})

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative power")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, int):
            other = self.ring.const(other)
        return (isinstance(other, Polynomial) and self.ring.compatible(other.ring)
                and self.terms == other.terms)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    # evaluation and substitution
    def evaluate(self, point) -> int:
        if len(point) != self.ring.nvars:
            raise ValueError(f"expected {self.ring.nvars} coordinates, got {len(point)}")
        p = self.ring.p
        pt = [int(x) % p for x in point]
        total = 0
        for e, c in self.terms.items():
            v = c
            for x, k in zip(pt, e):
                if k:
                    v = v * pow(x, k, p) % p
            total += v
        return total % p

    def compose(self, images, target: Ring | None = None) -> Polynomial:
        """Substitute ``x_i -> images[i]``."""
        if len(images) != self.ring.nvars:
            raise ValueError("one image per variable")
        target = target or images[0].ring
        cache = {}

        def power(i, k):
            key = (i, k)
            if key not in cache:
                cache[key] = target.one() if k == 0 else (images[i] if k == 1 else power(i, k - 1) * images[i])
            return cache[key]

        acc = {}
        p = target.p
        for e, c in self.terms.items():
            t = target.const(c)
            for i, k in enumerate(e):
                if k:
                    t = t * power(i, k)
            for m, v in t.terms.items():
                acc[m] = (acc.get(m, 0) + v) % p
        return Polynomial(target, {m: v for m, v in acc.items() if v})

    def diff(self, i: int) -> Polynomial:
        p = self.ring.p
        d = {}
        for e, c in self.terms.items():
            if e[i]:
                f = list(e)
                f[i] -= 1
                v = c * e[i] % p
                if v:
                    d[tuple(f)] = v
        return Polynomial(self.ring, d)

    # text
    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            factors = [str(c)] + [f"{self.ring.names[i]}^{k}" for i, k in enumerate(e) if k]
            parts.append("*".join(factors))
        return "+".join(parts)

    __str__ = to_text

    def __repr__(self):
        return f"Polynomial({self.to_text()!r})"


def field_arith(a: int, b: int | None, op: str, p: int = DEFAULT_PRIME) -> int:
    """One field operation with canonical output in ``[0, p)``."""
    F = PrimeField(p)
    if op == "add":
        return F.add(a, b)
    if op == "mul":
        return F.mul(a, b)
    if op == "neg":
        return F.neg(a)
    if op == "inv":
        return F.inv(a)
    raise ValueError(f"unknown op {op!r}")


def poly_arith(f: Polynomial, g: Polynomial, op: str) -> Polynomial:
    if not f.ring.compatible(g.ring):
        raise RingMismatch("operands live in different rings")
    if op == "add":
        return f + g
    if op == "mul":
        return f * g
    raise ValueError(f"unknown op {op!r}")
