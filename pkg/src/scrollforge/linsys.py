"""Plane linear systems with base conditions and the rational maps they define.

Blow-ups of the plane are never built; a class ``a h - sum b_i E_i`` is the
space of plane forms of degree ``a`` with multiplicity ``b_i`` at ``o_i``.
Images of maps are computed exactly, degree by degree, as kernels of the
pull-back ``S_d(target) -> (S_source / I_X)_{d e}``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .idealkit import (
    Ideal, coefficient_matrix, combine, ideal_from_pieces, kernel_combinations, normal_forms,
    saturate_irrelevant,
)
from .polycore import Polynomial, Ring, monomials, num_monomials
from .projlab import GeometryError, ProjScheme


@dataclass(frozen=True)
class BaseCondition:
    """Vanishing to order ``multiplicity`` along a reduced zero-dimensional locus."""

    locus: Ideal
    multiplicity: int = 1
    length: int | None = None

    def __post_init__(self):
        if self.multiplicity < 1:
            raise ValueError("multiplicity must be positive")

    def condition_ideal(self) -> Ideal:
        """Saturated ``m``-th power of the locus ideal (the symbolic power for reduced points)."""
        I = self.locus
        if self.multiplicity == 1:
            return I
        P = I
        for _ in range(self.multiplicity - 1):
            P = P * I
        return saturate_irrelevant(P)

    def expected_conditions(self) -> int:
        n = self.length if self.length is not None else self.locus.hilbert_data().degree
        return comb(self.multiplicity + 1, 2) * n


@dataclass
class FormBasis:
    degree: int
    forms: list
    expected: int

    @property
    def dim(self) -> int:
        return len(self.forms)

    @property
    def generic(self) -> bool:
        return self.dim == max(self.expected, 0)


def forms_with_base_conditions(ring: Ring, d: int, conds) -> FormBasis:
    """Basis of degree-``d`` forms satisfying every base condition."""
    if d < 1:
        raise ValueError("degree must be positive")
    mons = list(monomials(ring.nvars, d))
    polys = [ring.monomial(m) for m in mons]
    blocks = []
    expected = num_monomials(ring.nvars, d)
    for c in conds:
        J = c.condition_ideal()
        nfs = normal_forms(polys, J.groebner())
        if any(not f.is_zero() for f in nfs):
            blocks.append(coefficient_matrix(nfs, ring=ring)[0])
        expected -= c.expected_conditions()
    K = kernel_combinations(blocks, len(mons), ring.p)
    forms = combine(ring, mons, K)
    return FormBasis(d, forms, expected)


@dataclass
class RationalMapModel:
    """Map ``x -> (f_0(x) : ... : f_m(x))`` given by equal-degree forms."""

    source: Ring
    forms: tuple
    target: Ring | None = None

    def __post_init__(self):
        if not self.forms or all(f.is_zero() for f in self.forms):
            raise ValueError("a rational map needs a nonzero form")
        degs = {f.degree() for f in self.forms if not f.is_zero()}
        if len(degs) != 1:
            raise ValueError("forms must share one degree")
        if self.target is None:
            self.target = Ring(len(self.forms), self.source.field)

    @property
    def degree(self) -> int:
        return next(f.degree() for f in self.forms if not f.is_zero())

    def __call__(self, point):
        return tuple(f.evaluate(point) for f in self.forms)

    def pullback(self, g: Polynomial) -> Polynomial:
        return g.compose(list(self.forms), self.source)


class MonomialPowers:
    """Cache of products of images ``prod f_i^{e_i}``, reduced modulo an optional basis."""

    def __init__(self, forms, source: Ring, G=None):
        self.forms = list(forms)
        self.source = source
        self.G = G
        self.cache = {(0,) * len(self.forms): source.one()}

    def get(self, m):
        if m in self.cache:
            return self.cache[m]
        i = max(k for k, e in enumerate(m) if e)
        prev = list(m)
        prev[i] -= 1
        f = self.get(tuple(prev)) * self.forms[i]
        self.cache[m] = f
        return f

    def degree_piece(self, d):
        mons = list(monomials(len(self.forms), d))
        for k in range(d):
            for m in monomials(len(self.forms), k):
                self.get(m)
        return mons, [self.get(m) for m in mons]


def pullback_kernel(forms, target: Ring, d: int, source: Ring, G=None, powers=None):
    """Basis of ``{g in S_d(target) : g(forms) in I}`` with ``I`` given by basis ``G`` (or zero)."""
    powers = powers or MonomialPowers(forms, source, G)
    mons, imgs = powers.degree_piece(d)
    if G is not None:
        imgs = normal_forms(imgs, G)
    if all(f.is_zero() for f in imgs):
        K = np.eye(len(mons), dtype=np.int64)
    else:
        A, _ = coefficient_matrix(imgs, ring=source)
        K = kernel_combinations([A], len(mons), target.p)
    return combine(target, mons, K)


def image_ideal(forms, target: Ring, source: Ring, source_ideal: Ideal | None,
                max_degree: int, check_degrees: int = 1):
    """Ideal of the closure of the image, generated through ``max_degree``.

    The generated ideal is compared with the exact kernel dimensions in
    ``check_degrees`` further degrees; a mismatch means generators of higher
    degree are missing and raises :class:`GeometryError`.
    """
    G = source_ideal.groebner() if source_ideal is not None and not source_ideal.is_zero() else None
    powers = MonomialPowers(forms, source, G)
    pieces = {}
    for d in range(1, max_degree + 1):
        pieces[d] = pullback_kernel(forms, target, d, source, G, powers)
    J = ideal_from_pieces(target, pieces)
    J = J.reduced()
    for d in range(max_degree + 1, max_degree + 1 + check_degrees):
        k = len(pullback_kernel(forms, target, d, source, G, powers))
        have = num_monomials(target.nvars, d) - J.graded_dim(d)
        if have != k:
            raise GeometryError(
                f"image ideal needs generators beyond degree {max_degree} ({have} != {k} in degree {d})")
    return J


def image_scheme(m: RationalMapModel, X: ProjScheme | None = None, max_degree: int = 4,
                 check_degrees: int = 1, name: str = "") -> ProjScheme:
    """Closure of ``m(X minus base locus)``.

    ``X`` must be reduced with saturated ideal; the degree-``d`` part of the
    image ideal is then exactly the kernel of ``g -> g(forms) mod I_X``.
    """
    I = X.ideal if X is not None else None
    if I is not None and m.forms and all(f.is_zero() for f in normal_forms(list(m.forms), I.groebner())):
        raise GeometryError("scheme lies in the base locus; empty image")
    J = image_ideal(m.forms, m.target, m.source, I, max_degree, check_degrees)
    if J.is_unit():
        raise GeometryError("empty image")
    return ProjScheme(J, name)


# -- class arithmetic on blow-ups of the plane -------------------------------------------------


@dataclass(frozen=True)
class PlaneClass:
    """Divisor class ``a h - sum b_i E_i`` on a blow-up of the plane."""

    a: int
    b: tuple = ()

    def dot(self, other: PlaneClass) -> int:
        n = max(len(self.b), len(other.b))
        bs = self.b + (0,) * (n - len(self.b))
        cs = other.b + (0,) * (n - len(other.b))
        return self.a * other.a - sum(x * y for x, y in zip(bs, cs))

    def canonical(self) -> PlaneClass:
        return PlaneClass(-3, tuple(-1 for _ in self.b))

    def self_intersection(self) -> int:
        return self.dot(self)

    def k_pairing(self) -> int:
        return self.dot(self.canonical())

    def arithmetic_genus(self) -> int:
        return 1 + (self.self_intersection() + self.k_pairing()) // 2

    def expected_dim(self) -> int:
        """Affine dimension of the plane forms, assuming independent conditions."""
        return comb(self.a + 2, 2) - sum(comb(b + 1, 2) for b in self.b)


def class_arithmetic(x: PlaneClass, y: PlaneClass | None = None) -> dict:
    """Intersection numbers: ``y`` defaults to ``x``; the degree is ``x · y``."""
    y = x if y is None else y
    return {
        "product": x.dot(y),
        "self_intersection": x.self_intersection(),
        "k_pairing": x.k_pairing(),
        "pa": x.arithmetic_genus(),
    }
