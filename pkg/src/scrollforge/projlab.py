"""Projective schemes over F_p: spans, projections, singular loci and nodes.

Point sets are carried as ideals.  Individual coordinates are only
extracted for F_p-rational points; Galois orbits stay schemes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from sympy.polys.domains import ZZ
from sympy.polys.galoistools import gf_factor_sqf, gf_gcd, gf_quo, gf_sqf_part

from .idealkit import (
    Ideal, colon_linear, colon_piece, combine, graded_piece, hilbert_data, ideal_from_pieces,
    normal_forms, saturate_irrelevant,
)
from .linalg import kernel, matmul_mod, rank, rref
from .polycore import Polynomial, Ring, block, monomials


class GeometryError(ValueError):
    """Input violates a geometric precondition (containment, dimension)."""


@dataclass
class ProjScheme:
    """Subscheme of ``P^n`` given by a saturated homogeneous ideal."""

    ideal: Ideal
    name: str = ""

    @property
    def ring(self) -> Ring:
        return self.ideal.ring

    @property
    def ambient_dim(self) -> int:
        return self.ideal.nvars - 1

    @classmethod
    def from_ideal(cls, I: Ideal, name: str = "", saturated: bool = False) -> ProjScheme:
        if not saturated:
            I = saturate_irrelevant(I)
        return cls(I.reduced(), name)

    @classmethod
    def from_gens(cls, ring: Ring, gens, name: str = "", saturated: bool = False):
        return cls.from_ideal(Ideal(ring, gens), name, saturated)

    def hilbert_data(self):
        return hilbert_data(self.ideal)

    def degree(self) -> int:
        return self.hilbert_data().degree

    def dim(self) -> int:
        return self.hilbert_data().dim

    def is_empty(self) -> bool:
        return self.ideal.is_unit()

    def contains(self, other: ProjScheme) -> bool:
        """Scheme inclusion ``other ⊆ self``."""
        return other.ideal.contains_ideal(self.ideal)

    def same_as(self, other: ProjScheme) -> bool:
        return self.ideal == other.ideal

    def h0_ideal(self, d: int) -> int:
        """``h^0(I_X(d))`` for the saturated ideal."""
        from .polycore import num_monomials
        return num_monomials(self.ideal.nvars, d) - self.ideal.graded_dim(d)


@dataclass
class LinearSubspace(ProjScheme):
    @classmethod
    def from_forms(cls, ring: Ring, forms, name: str = "") -> LinearSubspace:
        forms = independent_forms(ring, forms)
        return cls(Ideal(ring, forms).reduced(), name)

    @property
    def codim(self) -> int:
        return len(self.ideal.gens)

    def forms(self):
        return list(self.ideal.gens)


@dataclass
class NodeCertificate:
    """Ordinary double point, either a rational point or a Galois-stable point scheme."""

    locus: Ideal
    length: int
    multiplicity_two: bool
    nondegenerate: bool
    point: tuple | None = None

    @property
    def ok(self) -> bool:
        return self.multiplicity_two and self.nondegenerate


class NodeCertificationError(GeometryError):
    def __init__(self, message, offending=None):
        super().__init__(message)
        self.offending = offending


# -- small helpers -----------------------------------------------------------------------------


def independent_forms(ring: Ring, forms):
    forms = [f for f in forms if not f.is_zero()]
    if not forms:
        return []
    mons = sorted({m for f in forms for m in f.terms}, key=ring.key, reverse=True)
    index = {m: j for j, m in enumerate(mons)}
    A = np.zeros((len(forms), len(mons)), dtype=np.int64)
    for i, f in enumerate(forms):
        for m, c in f.terms.items():
            A[i, index[m]] = c
    R, _ = rref(A, ring.p)
    return combine(ring, mons, R)


def random_linear_form(ring: Ring, rng: random.Random):
    return ring.linear_form([rng.randrange(1, ring.p) for _ in range(ring.nvars)])


def point_ideal(ring: Ring, coords) -> Ideal:
    """Ideal of the rational point with homogeneous coordinates ``coords``."""
    p = ring.p
    v = np.array([int(c) % p for c in coords], dtype=np.int64).reshape(1, -1)
    if not v.any():
        raise GeometryError("the zero vector is not a point")
    K = kernel(v, p)
    return Ideal(ring, [ring.linear_form(row) for row in K])


def points_ideal(ring: Ring, pts) -> Ideal:
    """Ideal of a finite set of rational points, by evaluation kernels."""
    pts = [tuple(int(c) % ring.p for c in q) for q in pts]
    if not pts:
        return Ideal(ring, [ring.one()])
    pieces = {}
    n = len(pts)
    stable = 0
    d = 1
    while True:
        mons = monomials(ring.nvars, d)
        E = np.array([[_eval_mono(m, q, ring.p) for m in mons] for q in pts], dtype=np.int64)
        K = kernel(E, ring.p)
        pieces[d] = combine(ring, list(mons), K)
        if len(mons) - K.shape[0] == n:
            stable += 1
            if stable == 2:
                break
        d += 1
    return ideal_from_pieces(ring, pieces).reduced()


def _eval_mono(m, q, p):
    v = 1
    for x, k in zip(q, m):
        if k:
            v = v * pow(x, k, p) % p
    return v


def normalize_point(q, p):
    q = [int(c) % p for c in q]
    for c in q:
        if c:
            inv = pow(c, p - 2, p)
            return tuple(x * inv % p for x in q)
    raise GeometryError("zero vector")


# -- zero-dimensional schemes ----------------------------------------------------------------


@dataclass
class PointData:
    """Structure of a zero-dimensional scheme read off multiplication matrices."""

    length: int
    distinct: int
    orbit_sizes: tuple
    rational_points: list
    separating_form: Polynomial = field(repr=False, default=None)
    denominator: Polynomial = field(repr=False, default=None)
    minpoly: list = field(repr=False, default_factory=list)
    factors: list = field(repr=False, default_factory=list)

    @property
    def is_reduced(self) -> bool:
        return self.length == self.distinct


def _poly_list_to_form(coeffs, L, L0):
    """Homogenize ``sum c_k t^k`` (high to low) at ``t = L / L0``."""
    deg = len(coeffs) - 1
    ring = L.ring
    out = ring.zero()
    Lp = [ring.one()]
    for _ in range(deg):
        Lp.append(Lp[-1] * L)
    L0p = [ring.one()]
    for _ in range(deg):
        L0p.append(L0p[-1] * L0)
    for i, c in enumerate(coeffs):
        k = deg - i
        if c % ring.p:
            out = out + (Lp[k] * L0p[deg - k]).scale(c)
    return out


class ZeroDimModel:
    """Multiplication operators ``x_i / L0`` on ``(S/I)_D`` for a zero-dimensional ``I``."""

    def __init__(self, I: Ideal, seed: int = 0):
        ring = I.ring
        self.ring = ring
        self.ideal = I
        p = ring.p
        hd = I.hilbert_data()
        if hd.dim > 0:
            raise GeometryError(f"scheme has dimension {hd.dim}, expected points")
        if hd.dim < 0:
            self.length = 0
            return
        self.length = N = hd.degree
        G = I.groebner()
        lms = G.lead_monomials()
        D = max(len(hd.numerator), max(sum(m) for m in lms)) + 1
        self.D = D
        std = [m for m in monomials(ring.nvars, D) if not any(_divides(l, m) for l in lms)]
        std1 = [m for m in monomials(ring.nvars, D + 1) if not any(_divides(l, m) for l in lms)]
        if len(std) != N or len(std1) != N:
            raise GeometryError("Hilbert function not yet stable")
        idx1 = {m: j for j, m in enumerate(std1)}
        self.std = std
        n = ring.nvars
        prods = []
        for i in range(n):
            for m in std:
                e = list(m)
                e[i] += 1
                prods.append(ring.monomial(tuple(e)))
        nfs = normal_forms(prods, G)
        X = np.zeros((n, N, N), dtype=np.int64)
        for k, f in enumerate(nfs):
            i, j = divmod(k, N)
            for mm, c in f.terms.items():
                X[i, idx1[mm], j] = c
        rng = random.Random(seed)
        for _ in range(20):
            c0 = [rng.randrange(1, p) for _ in range(n)]
            XL = sum(c * X[i] for i, c in enumerate(c0)) % p
            if rank(XL, p) == N:
                break
        else:
            raise GeometryError("no linear form avoids the points")
        self.L0 = ring.linear_form(c0)
        inv = _inverse(XL, p)
        self.M = [matmul_mod(inv, X[i], p) for i in range(n)]
        self.rng = rng

    def operator(self, coeffs):
        p = self.ring.p
        return sum(int(c) * self.M[i] for i, c in enumerate(coeffs)) % p


def _divides(a, b):
    return all(x <= y for x, y in zip(a, b))


def _inverse(A, p):
    n = A.shape[0]
    R, piv = rref(np.hstack([A % p, np.eye(n, dtype=np.int64)]), p)
    if len(piv) < n or any(int(piv[i]) != i for i in range(n)):
        raise GeometryError("singular matrix")
    return R[:, n:]


def minimal_polynomial(M, p, rng):
    """Minimal polynomial (coefficients high to low) via Krylov sequences of random vectors."""
    N = M.shape[0]
    result = [1]
    for _ in range(2):
        v = np.array([rng.randrange(p) for _ in range(N)], dtype=np.int64)
        K = [v]
        for _ in range(N):
            K.append(matmul_mod(M, K[-1], p))
        A = np.array(K).T  # columns v, Mv, ...
        # first linear dependency among columns
        for k in range(1, N + 2):
            if rank(A[:, :k], p) < k:
                ker = kernel(A[:, :k], p)[0]
                c = [int(x) for x in ker]
                lead = c[k - 1]
                inv = pow(lead, p - 2, p)
                poly = [x * inv % p for x in reversed(c)]
                result = _lcm(result, poly, p)
                break
    return result


def _lcm(a, b, p):
    g = gf_gcd(a, b, p, ZZ)
    return [int(x) % p for x in _gf_mul(a, gf_quo(b, g, p, ZZ), p)]


def _gf_mul(a, b, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] = (out[i + j] + x * y) % p
    return out


def _roots_in_field(poly, p):
    xs = np.arange(p, dtype=np.int64)
    acc = np.zeros(p, dtype=np.int64)
    for c in poly:
        acc = (acc * xs + int(c)) % p
    return [int(r) for r in np.nonzero(acc == 0)[0]]


def point_data(I: Ideal, seed: int = 0) -> PointData:
    """Length, number of geometric points, Galois orbit sizes and rational points."""
    Z = ZeroDimModel(I, seed)
    ring = I.ring
    p = ring.p
    if Z.length == 0:
        return PointData(0, 0, (), [], None, None, [1], [])
    rng = Z.rng
    n = ring.nvars
    counts = []
    best = None
    for _ in range(2):
        coeffs = [rng.randrange(p) for _ in range(n)]
        M = Z.operator(coeffs)
        mp = minimal_polynomial(M, p, rng)
        sq = [int(x) % p for x in gf_sqf_part(mp, p, ZZ)]
        counts.append(len(sq) - 1)
        if best is None or counts[-1] > len(best[1]) - 1:
            best = (coeffs, sq, M)
    coeffs, sq, M = best
    distinct = max(counts)
    _, facs = gf_factor_sqf(sq, p, ZZ)
    facs = sorted(([int(x) % p for x in f] for f in facs), key=lambda f: (len(f), f))
    sizes = tuple(sorted(len(f) - 1 for f in facs))
    pts = []
    for r in _roots_in_field(sq, p):
        pts.append(_point_at_eigenvalue(Z, M, r))
    pts.sort()
    L = ring.linear_form(coeffs)
    return PointData(Z.length, distinct, sizes, pts, L, Z.L0, sq, facs)


def _point_at_eigenvalue(Z, M, r):
    p = Z.ring.p
    N = M.shape[0]
    A = (M - r * np.eye(N, dtype=np.int64)) % p
    P = np.eye(N, dtype=np.int64)
    for _ in range(N):
        P = matmul_mod(P, A, p)
    W = kernel(P, p).T  # generalized eigenspace basis (columns)
    k = W.shape[1]
    vals = []
    for Mi in Z.M:
        X = _solve(W, matmul_mod(Mi, W, p), p)
        vals.append(int(np.trace(X) % p) * pow(k, p - 2, p) % p)
    return normalize_point(vals, p)


def _solve(W, B, p):
    """Solve ``W X = B`` for ``W`` with independent columns."""
    n, k = W.shape
    R, piv = rref(np.hstack([W, B]), p)
    if len(piv) < k or any(int(piv[i]) != i for i in range(k)):
        raise GeometryError("inconsistent subspace solve")
    return R[:k, k:]


def orbit_subscheme(I: Ideal, data: PointData, factors) -> Ideal:
    """Saturated ideal of the points of a reduced scheme whose separating values are roots of ``factors``."""
    ring = I.ring
    h = [1]
    for f in factors:
        h = _gf_mul(h, f, ring.p)
    H = _poly_list_to_form(h, data.separating_form, data.denominator)
    J = Ideal(ring, list(I.gens) + [H])
    return colon_linear(J, data.denominator, infinite=True).reduced()


def reduced_scheme(I: Ideal, seed: int = 0) -> Ideal:
    """Radical of a zero-dimensional ideal (reduced point set).

    The nilradical of the coordinate algebra is the kernel of its trace form
    (valid since ``p`` exceeds the length); its elements are lifted to forms
    and added to ``I``.
    """
    Z = ZeroDimModel(I, seed)
    ring = I.ring
    if Z.length == 0:
        return Ideal(ring, [ring.one()])
    p = ring.p
    if Z.length >= p:
        raise GeometryError("trace-form radical needs p > length")
    mats = np.array([_monomial_operator(Z, m) for m in Z.std], dtype=np.int64)
    N = Z.length
    T = matmul_mod(mats.reshape(N, N * N), mats.transpose(0, 2, 1).reshape(N, N * N).T, p)
    K = kernel(T, p)
    if K.shape[0] == 0:
        return I.reduced()
    extra = combine(ring, Z.std, K)
    J = Ideal(ring, list(I.gens) + extra)
    return colon_linear(J, Z.L0, infinite=True).reduced()


def _monomial_operator(Z: ZeroDimModel, m):
    p = Z.ring.p
    out = np.eye(Z.length, dtype=np.int64)
    for i, e in enumerate(m):
        for _ in range(e):
            out = matmul_mod(Z.M[i], out, p)
    return out


def scheme_length(I: Ideal) -> int:
    hd = I.hilbert_data()
    if hd.dim > 0:
        raise GeometryError(f"positive-dimensional intersection (dim {hd.dim})")
    return hd.degree if hd.dim == 0 else 0


# -- operations -----------------------------------------------------------------------------


def span(X: ProjScheme) -> LinearSubspace:
    """Smallest linear subspace containing ``X``: the degree-one part of its ideal."""
    if X.is_empty():
        raise GeometryError("span of the empty scheme")
    forms = graded_piece(X.ideal, 1)
    return LinearSubspace.from_forms(X.ring, forms, f"span({X.name})")


def linear_forms_of_center(center: LinearSubspace):
    return independent_forms(center.ring, graded_piece(center.ideal, 1))


def project_from(X: ProjScheme, center: LinearSubspace, max_degree: int = 6) -> ProjScheme:
    """Closure of the image of ``X`` under projection from ``center``."""
    from .linsys import RationalMapModel, image_scheme
    forms = linear_forms_of_center(center)
    if not forms:
        raise GeometryError("center is the whole space")
    if center.contains(X):
        raise GeometryError("scheme lies inside the center; empty image")
    m = RationalMapModel(X.ring, tuple(forms))
    return image_scheme(m, X, max_degree=max_degree)


def jacobian(gens, ring: Ring):
    return [[g.diff(i) for i in range(ring.nvars)] for g in gens]


def _det(Mx):
    n = len(Mx)
    if n == 1:
        return Mx[0][0]
    if n == 2:
        return Mx[0][0] * Mx[1][1] - Mx[0][1] * Mx[1][0]
    out = None
    for j in range(n):
        if Mx[0][j].is_zero():
            continue
        minor = [row[:j] + row[j + 1:] for row in Mx[1:]]
        t = Mx[0][j] * _det(minor)
        if j % 2:
            t = -t
        out = t if out is None else out + t
    return out if out is not None else Mx[0][0].ring.zero()


def singular_locus(X: ProjScheme, codim: int, exact_minor_limit: int = 400,
                   random_minors: int | None = None, seed: int = 0) -> ProjScheme:
    """Subscheme cut by ``I_X`` and the ``codim x codim`` Jacobian minors.

    When the number of minors exceeds ``exact_minor_limit`` the minors of
    random row/column combinations are used instead; this cuts out the same
    set for general choices (the scheme structure may differ).
    """
    ring = X.ring
    gens = list(X.ideal.gens)
    n = ring.nvars
    p = ring.p
    if codim == 1 and len(gens) == 1:
        F = gens[0]
        return ProjScheme.from_gens(ring, [F] + [F.diff(i) for i in range(n)], f"Sing({X.name})")
    Jm = jacobian(gens, ring)
    from math import comb
    count = comb(len(gens), codim) * comb(n, codim)
    minors = []
    if count <= exact_minor_limit and random_minors is None:
        for rows in combinations(range(len(gens)), codim):
            for cols in combinations(range(n), codim):
                d = _det([[Jm[r][c] for c in cols] for r in rows])
                if not d.is_zero():
                    minors.append(d)
    else:
        rng = random.Random(seed)
        k = random_minors or (X.dim() + 2)
        top = max(g.degree() for g in gens)
        for _ in range(k):
            rows = []
            for _ in range(codim):
                comb_row = [ring.zero()] * n
                for g, jr in zip(gens, Jm):
                    # lift lower-degree generators by a random form
                    mult = ring.random_poly(rng, top - g.degree())
                    for c in range(n):
                        comb_row[c] = comb_row[c] + jr[c] * mult
                rows.append(comb_row)
            B = [[rng.randrange(p) for _ in range(codim)] for _ in range(n)]
            Mx = [[sum((row[c].scale(B[c][j]) for c in range(n)), ring.zero())
                   for j in range(codim)] for row in rows]
            minors.append(_det(Mx))
    return ProjScheme.from_gens(ring, gens + minors, f"Sing({X.name})")


def hessian(F: Polynomial):
    n = F.ring.nvars
    return [[F.diff(i).diff(j) for j in range(n)] for i in range(n)]


def certify_plane_nodes(F: Polynomial, S: Ideal) -> list:
    """Certificates for the singular points of the plane curve ``F = 0`` in ``S``.

    A singular point is a node iff the Hessian has rank exactly 2 there; this is
    tested on the whole scheme at once: ``S`` plus all 2x2 Hessian minors must be
    the irrelevant ideal.
    """
    ring = F.ring
    H = hessian(F)
    minors = []
    for r in combinations(range(3), 2):
        for c in combinations(range(3), 2):
            minors.append(H[r[0]][c[0]] * H[r[1]][c[1]] - H[r[0]][c[1]] * H[r[1]][c[0]])
    sing_ok = all(f.is_zero() for f in normal_forms([F] + [F.diff(i) for i in range(3)], S.groebner()))
    if not sing_ok:
        raise GeometryError("locus is not contained in the singular locus")
    bad = saturate_irrelevant(Ideal(ring, list(S.gens) + minors))
    data = point_data(S)
    if not bad.is_unit():
        raise NodeCertificationError("non-nodal singular point present", bad)
    if not data.is_reduced:
        raise NodeCertificationError("singular scheme is not reduced", S)
    certs = [NodeCertificate(point_ideal(ring, q), 1, True, True, q) for q in data.rational_points]
    irr_len = data.length - len(certs)
    if irr_len:
        certs.append(NodeCertificate(S, irr_len, True, True, None))
    return certs


def move_point_to_origin(ring: Ring, q):
    """Substitution data sending ``(1:0:...:0)`` to ``q``: returns (x in y, y in x)."""
    p = ring.p
    n = ring.nvars
    q = [int(c) % p for c in q]
    j = next(i for i, c in enumerate(q) if c)
    cols = [q] + [[int(k == i) for k in range(n)] for i in range(n) if i != j]
    A = np.array(cols, dtype=np.int64).T  # x = A y
    Ainv = _inverse(A, p)
    x_in_y = [ring.linear_form(A[i]) for i in range(n)]
    y_in_x = [ring.linear_form(Ainv[i]) for i in range(n)]
    return x_in_y, y_in_x


def tangent_cone(X: ProjScheme, q) -> Ideal:
    """Projectivized tangent cone of ``X`` at the rational point ``q``, in ``P^{n-1}``."""
    ring = X.ring
    n = ring.nvars
    x_in_y, _ = move_point_to_origin(ring, q)
    r1 = ring.with_order(block(1))
    gens = [g.compose(x_in_y, ring).with_ring(r1) for g in X.ideal.gens]
    G = Ideal(r1, gens).groebner()
    target = Ring(n - 1, ring.field)
    forms = []
    for g in G.elements:
        top = max(e[0] for e in g.terms)
        init = {e[1:]: c for e, c in g.terms.items() if e[0] == top}
        forms.append(Polynomial(target, init))
    return Ideal(target, forms)


def _two_reduced_points(I: Ideal) -> bool:
    hd = I.hilbert_data()
    if hd.dim != 0 or hd.degree != 2:
        return False
    return point_data(I).distinct == 2


def certify_point_node(X: ProjScheme, q, kind: str, seed: int = 0) -> NodeCertificate:
    """Ordinary double point of a curve or a surface at a rational point.

    Curves: the tangent cone is two distinct reduced points of ``P^{n-1}``.
    Surfaces: the tangent cone is a pair of planes meeting only at ``q``
    (two skew lines in a hyperplane of ``P^{n-1}``), checked through its
    Hilbert data and a general hyperplane section.
    """
    ring = X.ring
    if not all(g.evaluate(q) == 0 for g in X.ideal.gens):
        raise GeometryError(f"point {q} is not on the scheme")
    TC = tangent_cone(X, q)
    hd = TC.hilbert_data()
    if kind == "curve":
        mult2 = hd.dim == 0 and hd.degree == 2
        nondeg = mult2 and _two_reduced_points(TC)
    elif kind == "surface":
        mult2 = hd.dim == 1 and hd.degree == 2
        lin = len(graded_piece(TC, 1))
        nondeg = False
        if mult2 and hd.pa == -1 and lin == ring.nvars - 5:
            rng = random.Random(seed)
            H = random_linear_form(TC.ring, rng)
            sec = saturate_irrelevant(Ideal(TC.ring, list(TC.gens) + [H]))
            nondeg = _two_reduced_points(sec)
    else:
        raise ValueError("kind is 'curve' or 'surface'")
    return NodeCertificate(point_ideal(ring, q), 1, mult2, nondeg, tuple(q))


def certify_nodes(X: ProjScheme, S: ProjScheme, kind: str | None = None) -> list:
    """Certify every point of ``S`` as a node of ``X``.

    Plane curves are handled on the whole (possibly irrational) scheme ``S``;
    in higher ambient dimension every point of ``S`` must be rational.
    """
    if X.ambient_dim == 2 and len(X.ideal.gens) == 1:
        return certify_plane_nodes(X.ideal.gens[0], S.ideal)
    data = point_data(S.ideal)
    if len(data.rational_points) != data.distinct:
        raise GeometryError("node certification in P^n needs rational points")
    kind = kind or ("curve" if X.dim() == 1 else "surface")
    certs = []
    for q in data.rational_points:
        c = certify_point_node(X, q, kind)
        if not c.ok:
            raise NodeCertificationError(f"point {q} is not an ordinary node", q)
        certs.append(c)
    return certs


def residual(total: ProjScheme, component: ProjScheme, max_degree: int | None = None) -> ProjScheme:
    """Saturation of ``I_total : I_component``.

    With ``max_degree`` the colon is computed degree by degree through that
    degree (linear algebra on normal forms), which is exact after saturation
    once the residual's generators are reached.
    """
    if not component.ideal.contains_ideal(total.ideal):
        raise GeometryError("component is not contained in total")
    ring = total.ring
    if max_degree is None:
        from .idealkit import colon
        C = colon(total.ideal, component.ideal)
    else:
        pieces = {d: colon_piece(total.ideal, component.ideal.gens, d)
                  for d in range(1, max_degree + 1)}
        C = ideal_from_pieces(ring, pieces)
    return ProjScheme.from_ideal(C, f"res({total.name},{component.name})")


def intersection_length(X: ProjScheme, Y: ProjScheme) -> int:
    """Length of the zero-dimensional scheme ``X ∩ Y``."""
    I = saturate_irrelevant(X.ideal + Y.ideal)
    return scheme_length(I)


def intersect_schemes(X: ProjScheme, Y: ProjScheme, name: str = "") -> ProjScheme:
    return ProjScheme.from_ideal(X.ideal + Y.ideal, name)


# -- singular loci beyond plane curves ---------------------------------------------------------


def _graded_rows(X: ProjScheme):
    ring = X.ring
    bydeg = {}
    for g in X.ideal.gens:
        bydeg.setdefault(g.degree(), []).append(g)
    return {d: jacobian(gs, ring) for d, gs in sorted(bydeg.items())}


def _row_combination(Jd, rng, ring):
    n = ring.nvars
    coeff = [rng.randrange(ring.p) for _ in Jd]
    return [sum((Jd[r][c].scale(coeff[r]) for r in range(len(Jd))), ring.zero()) for c in range(n)]


def _column_minor(rows, rng, ring):
    k = len(rows)
    n = ring.nvars
    B = [[rng.randrange(ring.p) for _ in range(k)] for _ in range(n)]
    M = [[sum((row[c].scale(B[c][j]) for c in range(n)), ring.zero()) for j in range(k)]
         for row in rows]
    return _det(M)


def typed_minor(X: ProjScheme, types, seed: int = 0) -> Polynomial:
    """Minor of random row combinations, each row taken within one generator degree.

    Keeping each row inside a single degree keeps the minor homogeneous, so
    ``X`` is smooth wherever such a minor is nonzero.
    """
    rng = random.Random(seed)
    Jm = _graded_rows(X)
    rows = [_row_combination(Jm[t], rng, X.ring) for t in types]
    return _column_minor(rows, rng, X.ring)


def singular_candidates(X: ProjScheme, gens, codim: int, count: int | None = None,
                        seed: int = 0) -> Ideal:
    """Ideal of ``X`` plus ``codim``-minors of the Jacobian of ``gens`` (a subset of ``I_X``).

    Rows of a subset have smaller rank, so the zero set contains ``Sing(X)``.
    All minors are used when ``count`` is None, otherwise ``count`` random ones.
    """
    ring = X.ring
    Jm = jacobian(list(gens), ring)
    if count is None:
        minors = [_det([[Jm[r][c] for c in cols] for r in rows])
                  for rows in combinations(range(len(Jm)), codim)
                  for cols in combinations(range(ring.nvars), codim)]
    else:
        rng = random.Random(seed)
        minors = [_column_minor([_row_combination(Jm, rng, ring) for _ in range(codim)], rng, ring)
                  for _ in range(count)]
    return Ideal(ring, list(X.ideal.gens) + [m for m in minors if not m.is_zero()])


def _minor_types(degrees, codim):
    from itertools import combinations_with_replacement
    return list(combinations_with_replacement(degrees, codim))


def certify_smooth_orbit(X: ProjScheme, orbit: Ideal, codim: int, seed: int = 0):
    """Degree types of a Jacobian minor that is a unit on ``orbit``, or None."""
    degrees = sorted({g.degree() for g in X.ideal.gens})
    for k, types in enumerate(_minor_types(degrees, codim)):
        m = typed_minor(X, types, seed + k)
        if m.is_zero():
            continue
        if saturate_irrelevant(Ideal(X.ring, list(orbit.gens) + [m])).is_unit():
            return types
    return None


@dataclass
class SingularityReport:
    """Outcome of classifying the points of a candidate superset of ``Sing(X)``."""

    nodes: list
    smooth_orbits: list
    uncertified: list

    @property
    def ok(self) -> bool:
        return not self.uncertified


def classify_candidates(X: ProjScheme, candidates: Ideal, kind: str, seed: int = 0) -> SingularityReport:
    """Split the candidate points into certified nodes and certified smooth points.

    Rational points are tried as nodes first; everything else (and each
    Galois orbit as a whole) must pass a smoothness certificate.
    """
    codim = X.ring.nvars - 1 - X.dim()
    data = point_data(saturate_irrelevant(candidates), seed)
    nodes, smooth, bad = [], [], []
    for q in data.rational_points:
        if certify_point_node(X, q, kind, seed).ok:
            nodes.append(tuple(q))
        elif certify_smooth_orbit(X, point_ideal(X.ring, q), codim, seed) is not None:
            smooth.append(1)
        else:
            bad.append(tuple(q))
    for f in data.factors:
        if len(f) == 2:
            continue
        orbit = orbit_subscheme(candidates, data, [f])
        if certify_smooth_orbit(X, orbit, codim, seed) is not None:
            smooth.append(len(f) - 1)
        else:
            bad.append(len(f) - 1)
    return SingularityReport(sorted(nodes), sorted(smooth), bad)


def certify_smooth(X: ProjScheme, locus: Ideal | None = None, rounds: int | None = None,
                   seed: int = 0) -> bool:
    """Sound smoothness test of ``X`` along ``locus`` (default: all of ``X``).

    Adds ``rounds`` typed minors of every degree type; if the result is the
    irrelevant ideal then the Jacobian has full rank at every point.  Each
    minor can vanish in codimension one on ``X``, so the default is
    ``dim X + 1`` rounds.
    """
    codim = X.ring.nvars - 1 - X.dim()
    if rounds is None:
        rounds = X.dim() + 1
    degrees = sorted({g.degree() for g in X.ideal.gens})
    base = locus if locus is not None else X.ideal
    minors = []
    for r in range(rounds):
        for k, types in enumerate(_minor_types(degrees, codim)):
            m = typed_minor(X, types, seed + 1000 * r + k)
            if not m.is_zero():
                minors.append(m)
    return saturate_irrelevant(Ideal(X.ring, list(base.gens) + list(X.ideal.gens) + minors)).is_unit()


def _operator_of(Z: ZeroDimModel, f: Polynomial, cache: dict):
    """Multiplication by ``f / L0^deg f`` on the coordinate algebra of ``Z``."""
    p = Z.ring.p
    N = Z.length

    def mono(e):
        if e in cache:
            return cache[e]
        i = next(k for k, x in enumerate(e) if x)
        prev = list(e)
        prev[i] -= 1
        out = matmul_mod(Z.M[i], mono(tuple(prev)), p)
        cache[e] = out
        return out

    cache.setdefault((0,) * Z.ring.nvars, np.eye(N, dtype=np.int64))
    acc = np.zeros((N, N), dtype=np.int64)
    for e, c in f.terms.items():
        acc = (acc + c * mono(e)) % p
    return acc


def _leibniz(blocks, p):
    """Determinant of a ``k x k`` array of commuting matrices, batched over leading axes."""
    from itertools import permutations
    k = blocks.shape[-3]
    total = np.zeros(blocks.shape[:-4] + blocks.shape[-2:], dtype=np.int64)
    for perm in permutations(range(k)):
        sign = 1
        for i in range(k):
            for j in range(i + 1, k):
                if perm[i] > perm[j]:
                    sign = -sign
        term = blocks[..., 0, perm[0], :, :]
        for i in range(1, k):
            term = matmul_mod(term, blocks[..., i, perm[i], :, :], p)
        total = (total + sign * term) % p
    return total


def singular_along(X: ProjScheme, S: Ideal) -> bool:
    """True when every point of the reduced zero-dimensional scheme ``S`` is singular on ``X``.

    Jacobian entries become commuting multiplication operators on the
    coordinate algebra of ``S``; this algebra is a product of fields, so an
    operator vanishes iff the element vanishes at every geometric point.  All
    ``codim x codim`` minors are formed exactly.
    """
    ring = X.ring
    p = ring.p
    codim = ring.nvars - 1 - X.dim()
    Z = ZeroDimModel(S)
    if Z.length == 0:
        return True
    cache = {}
    Jm = jacobian(list(X.ideal.gens), ring)
    E = np.array([[_operator_of(Z, e, cache) for e in row] for row in Jm], dtype=np.int64)
    rows = list(combinations(range(E.shape[0]), codim))
    cols = list(combinations(range(ring.nvars), codim))
    for rset in rows:
        sub = E[list(rset)]
        blocks = np.stack([sub[:, list(c)] for c in cols])  # (cols, k, k, N, N)
        if _leibniz(blocks, p).any():
            return False
    return True


@dataclass
class SingularSetReport:
    singular: int
    certified_nodes: int
    expected_found: int
    smooth_orbits: list
    uncertified: list

    @property
    def ok(self) -> bool:
        return not self.uncertified


def classify_against(X: ProjScheme, candidates: Ideal, expected: Ideal, kind: str,
                     seed: int = 0) -> SingularSetReport:
    """Check that the singular points among ``candidates`` are exactly the points of ``expected``.

    Orbits inside ``expected`` must be singular (exact Jacobian test) and
    rational ones are also certified as nodes; every other orbit must pass a
    smoothness certificate.
    """
    codim = X.ring.nvars - 1 - X.dim()
    candidates = reduced_scheme(saturate_irrelevant(candidates), seed)
    data = point_data(candidates, seed)
    singular = nodes = found = 0
    smooth, bad = [], []
    for f in data.factors:
        size = len(f) - 1
        orbit = orbit_subscheme(candidates, data, [f])
        if orbit.contains_ideal(expected):
            found += size
            if singular_along(X, orbit):
                singular += size
                if size == 1:
                    q = next(r for r in data.rational_points
                             if all(g.evaluate(r) == 0 for g in orbit.gens))
                    nodes += certify_point_node(X, q, kind, seed).ok
            else:
                bad.append(size)
        elif certify_smooth_orbit(X, orbit, codim, seed) is not None:
            smooth.append(size)
        else:
            bad.append(size)
    return SingularSetReport(singular, nodes, found, sorted(smooth), bad)
